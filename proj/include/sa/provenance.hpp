#pragma once

// Derivation replay over a saturator's clause arena.

#include "saturation.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sa
{

    /// Input clauses at the leaves of the derivation of `id`, ascending.
    inline std::vector<ClauseId> derivation_leaves(const Saturator &s, ClauseId id)
    {
        if (!s.has_clause(id))
            throw Error("unknown derivation id " + std::to_string(id));
        std::set<ClauseId> leaves, seen;
        std::vector<ClauseId> todo{id};
        while (!todo.empty())
        {
            ClauseId c = todo.back();
            todo.pop_back();
            if (!seen.insert(c).second)
                continue;
            const StoredClause &sc = s.clause(c);
            if (!sc.inference)
                leaves.insert(c);
            else
                for (ClauseId p : sc.inference->premises)
                    todo.push_back(p);
        }
        return {leaves.begin(), leaves.end()};
    }

    /// Leaves of the derivation that are abstraction clauses.
    inline std::vector<ClauseId> abstraction_leaves(const Saturator &s, ClauseId id)
    {
        std::vector<ClauseId> out;
        for (ClauseId leaf : derivation_leaves(s, id))
            if (s.clause(leaf).clause.origin.kind == OriginKind::Abstraction)
                out.push_back(leaf);
        return out;
    }

    /**
     * Recomputes the conclusion of the inference that produced `id` from its
     * stored premises, unifier and renaming. Returns a description of the first
     * mismatch, or nullopt when the stored clause is reproduced exactly (in
     * particular, its recording part is the instantiated concatenation of the
     * premises' recording parts).
     */
    inline std::optional<std::string> replay_inference(const Saturator &s, ClauseId id)
    {
        const StoredClause &sc = s.clause(id);
        if (!sc.inference)
            return std::nullopt;
        const InferenceRecord &rec = *sc.inference;
        const Substitution &theta = rec.unifier;
        Clause expected;

        if (rec.rule == "resolution")
        {
            if (rec.premises.size() != 2 || rec.positions.size() != 2)
                return "malformed resolution record";
            const Clause &c1 = s.clause(rec.premises[0]).clause;
            const Clause c2 = shift_vars(s.clause(rec.premises[1]).clause, rec.offset);
            if (!c1.literals.at(rec.positions[0]).positive || c2.literals.at(rec.positions[1]).positive)
                return "resolved literals have wrong polarity";
            if (!theta.apply(c1.literals[rec.positions[0]]).same_atom(theta.apply(c2.literals[rec.positions[1]])))
                return "unifier does not unify the resolved literals";
            for (std::size_t i = 0; i < c1.literals.size(); ++i)
                if (i != rec.positions[0])
                    expected.literals.push_back(theta.apply(c1.literals[i]));
            for (std::size_t i = 0; i < c2.literals.size(); ++i)
                if (i != rec.positions[1])
                    expected.literals.push_back(theta.apply(c2.literals[i]));
            for (const Clause *p : {&c1, &c2})
            {
                for (const Literal &l : p->recording)
                    expected.recording.push_back(theta.apply(l));
                for (const PrefixConstraint &pc : p->prefixes)
                    expected.prefixes.push_back({theta.apply(pc.term), pc.prefix});
            }
        }
        else if (rec.rule == "factoring")
        {
            if (rec.premises.size() != 1 || rec.positions.size() != 2)
                return "malformed factoring record";
            const Clause &c = s.clause(rec.premises[0]).clause;
            std::size_t i = rec.positions[0], j = rec.positions[1];
            if (!theta.apply(c.literals.at(i)).same_atom(theta.apply(c.literals.at(j))) ||
                c.literals[i].positive != c.literals[j].positive)
                return "unifier does not unify the factored literals";
            std::size_t drop = std::max(i, j);
            for (std::size_t k = 0; k < c.literals.size(); ++k)
                if (k != drop)
                    expected.literals.push_back(theta.apply(c.literals[k]));
            for (const Literal &l : c.recording)
                expected.recording.push_back(theta.apply(l));
            for (const PrefixConstraint &pc : c.prefixes)
                expected.prefixes.push_back({theta.apply(pc.term), pc.prefix});
        }
        else
            return "unknown rule " + rec.rule;

        expected = rec.renaming.apply(expected);
        if (rec.merged)
            expected = merge_recording_duplicates(expected);
        if (expected.literals != sc.clause.literals)
            return "ordinary part differs from the replayed conclusion";
        if (expected.recording != sc.clause.recording)
            return "recording part is not the inherited recording literals";
        if (expected.prefixes.size() != sc.clause.prefixes.size())
            return "prefix constraints differ";
        for (std::size_t k = 0; k < expected.prefixes.size(); ++k)
            if (expected.prefixes[k].term != sc.clause.prefixes[k].term ||
                expected.prefixes[k].prefix != sc.clause.prefixes[k].prefix)
                return "prefix constraints differ";
        return std::nullopt;
    }

} // namespace sa
