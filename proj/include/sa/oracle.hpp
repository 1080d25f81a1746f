#pragma once

// Brute-force reference reasoner. Computes the concrete answers of a deductive
// query directly on the ground level, without abstractions, recording literals
// or any code from the saturation engine:
//
//   * Horn, range-restricted knowledge bases: semi-naive forward chaining to the
//     least model, bounded by term depth. Negative clauses whose bodies hold make
//     DB + KB inconsistent, in which case every candidate tuple is an answer.
//   * Other function-free knowledge bases: grounding over the constants and a
//     DPLL satisfiability check per candidate tuple.
//
// Candidate tuples range over the constants of the store, the KB and the query.

#include "fact_store.hpp"
#include "parser.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sa
{

    struct GroundAnswerSet
    {
        std::set<std::vector<Term>> tuples;
        bool exact = true; // false when the depth bound cut off derived facts
    };

    namespace oracle_detail
    {

        using Atom = std::pair<SymbolId, std::vector<Term>>;
        using Binding = std::map<VarId, Term>;

        inline Term ground(const Term &t, const Binding &b)
        {
            if (t.is_var())
            {
                auto it = b.find(t.var_id());
                if (it == b.end())
                    throw Error("oracle: unbound variable while grounding");
                return it->second;
            }
            std::vector<Term> args;
            for (const Term &a : t.args())
                args.push_back(ground(a, b));
            return Term::app(t.functor(), std::move(args));
        }

        /// One-way match of a pattern against a ground term, extending `b`.
        inline bool match(const Term &pattern, const Term &g, Binding &b)
        {
            if (pattern.is_var())
            {
                auto [it, inserted] = b.emplace(pattern.var_id(), g);
                return inserted || it->second == g;
            }
            if (g.is_var() || pattern.functor() != g.functor() || pattern.args().size() != g.args().size())
                return false;
            for (std::size_t i = 0; i < g.args().size(); ++i)
                if (!match(pattern.args()[i], g.args()[i], b))
                    return false;
            return true;
        }

        inline void vars_of(const Term &t, std::set<VarId> &out)
        {
            if (t.is_var())
                out.insert(t.var_id());
            for (const Term &a : t.args())
                vars_of(a, out);
        }

        inline void constants_of(const Term &t, std::set<SymbolId> &out)
        {
            if (t.is_var())
                return;
            if (t.args().empty())
                out.insert(t.functor());
            for (const Term &a : t.args())
                constants_of(a, out);
        }

        struct HornRule
        {
            std::optional<Literal> head;
            std::vector<Literal> body; // positive atoms
        };

        using Facts = std::map<SymbolId, std::set<std::vector<Term>>>;

        /// All bindings satisfying `body` against `facts`, optionally forcing
        /// position `delta_pos` to range over `delta` instead.
        inline void join(const std::vector<Literal> &body, std::size_t i, const Facts &facts,
                         const Facts *delta, std::size_t delta_pos, Binding &b,
                         const std::function<void(const Binding &)> &emit)
        {
            if (i == body.size())
            {
                emit(b);
                return;
            }
            const Facts &source = (delta && i == delta_pos) ? *delta : facts;
            auto it = source.find(body[i].pred);
            if (it == source.end())
                return;
            for (const std::vector<Term> &row : it->second)
            {
                Binding saved = b;
                bool ok = true;
                for (std::size_t j = 0; j < row.size() && ok; ++j)
                    ok = match(body[i].args[j], row[j], b);
                if (ok)
                    join(body, i + 1, facts, delta, delta_pos, b, emit);
                b = std::move(saved);
            }
        }

        inline std::size_t atom_depth(const std::vector<Term> &args)
        {
            std::size_t d = 0;
            for (const Term &t : args)
                d = std::max(d, t.depth());
            return d;
        }

        // ---------------------------------------------------------------
        // DPLL over ground clauses of integer literals (+v / -v, v >= 1)

        class Dpll
        {
        public:
            explicit Dpll(std::size_t vars) : value_(vars + 1, 0) {}

            void add(std::vector<int> clause) { clauses_.push_back(std::move(clause)); }

            bool satisfiable() { return solve(); }

        private:
            bool solve()
            {
                std::vector<int> trail;
                auto undo = [&]
                {
                    for (int v : trail)
                        value_[v] = 0;
                };
                // unit propagation
                for (bool changed = true; changed;)
                {
                    changed = false;
                    for (const auto &c : clauses_)
                    {
                        int unassigned = 0, last = 0;
                        bool sat = false;
                        for (int l : c)
                        {
                            int v = value_[std::abs(l)];
                            if (v == 0)
                            {
                                ++unassigned;
                                last = l;
                            }
                            else if ((v > 0) == (l > 0))
                            {
                                sat = true;
                                break;
                            }
                        }
                        if (sat)
                            continue;
                        if (unassigned == 0)
                        {
                            undo();
                            return false;
                        }
                        if (unassigned == 1)
                        {
                            value_[std::abs(last)] = last > 0 ? 1 : -1;
                            trail.push_back(std::abs(last));
                            changed = true;
                        }
                    }
                }
                int branch = 0;
                for (const auto &c : clauses_)
                {
                    bool sat = false;
                    int free_lit = 0;
                    for (int l : c)
                    {
                        int v = value_[std::abs(l)];
                        if (v == 0 && !free_lit)
                            free_lit = l;
                        else if (v != 0 && (v > 0) == (l > 0))
                            sat = true;
                    }
                    if (!sat && free_lit)
                    {
                        branch = free_lit;
                        break;
                    }
                }
                if (branch == 0)
                {
                    undo();
                    return true;
                }
                for (int sign : {1, -1})
                {
                    value_[std::abs(branch)] = (branch > 0 ? 1 : -1) * sign;
                    if (solve())
                    {
                        value_[std::abs(branch)] = 0;
                        undo();
                        return true;
                    }
                    value_[std::abs(branch)] = 0;
                }
                undo();
                return false;
            }

            std::vector<signed char> value_;
            std::vector<std::vector<int>> clauses_;
        };

        /// Enumerates every assignment of `vars` to `domain`.
        inline void for_each_assignment(const std::vector<VarId> &vars, const std::vector<SymbolId> &domain,
                                        const std::function<void(const Binding &)> &f)
        {
            Binding b;
            std::function<void(std::size_t)> rec = [&](std::size_t i)
            {
                if (i == vars.size())
                {
                    f(b);
                    return;
                }
                for (SymbolId c : domain)
                {
                    b[vars[i]] = Term::app(c);
                    rec(i + 1);
                }
                b.erase(vars[i]);
            };
            rec(0);
        }

        class GroundAtoms
        {
        public:
            int id(const Atom &a)
            {
                auto [it, inserted] = ids_.emplace(a, static_cast<int>(ids_.size()) + 1);
                return it->second;
            }
            std::size_t size() const { return ids_.size(); }

        private:
            std::map<Atom, int> ids_;
        };

        inline std::vector<std::vector<int>> ground_clause(const std::vector<Literal> &lits,
                                                           const std::vector<SymbolId> &domain,
                                                           GroundAtoms &atoms, const Binding &fixed = {})
        {
            std::set<VarId> vs;
            for (const Literal &l : lits)
                for (const Term &t : l.args)
                    vars_of(t, vs);
            std::vector<VarId> free;
            for (VarId v : vs)
                if (!fixed.count(v))
                    free.push_back(v);
            std::vector<std::vector<int>> out;
            for_each_assignment(free, domain, [&](const Binding &b)
                                {
                Binding all = fixed;
                all.insert(b.begin(), b.end());
                std::vector<int> c;
                for (const Literal &l : lits)
                {
                    std::vector<Term> args;
                    for (const Term &t : l.args)
                        args.push_back(ground(t, all));
                    int v = atoms.id({l.pred, std::move(args)});
                    c.push_back(l.positive ? v : -v);
                }
                out.push_back(std::move(c)); });
            return out;
        }

    } // namespace oracle_detail

    /// Constants candidate answers are drawn from: the store's active domain
    /// plus constants written in the knowledge base or the query.
    inline std::set<SymbolId> candidate_constants(const FactStore &store, const std::vector<Clause> &kb,
                                                  const DeductiveQuery &query)
    {
        std::set<SymbolId> out = store.active_domain();
        for (const Clause &c : kb)
            for (const Literal &l : c.literals)
                for (const Term &t : l.args)
                    oracle_detail::constants_of(t, out);
        for (const Literal &l : query.goal.literals)
            for (const Term &t : l.args)
                oracle_detail::constants_of(t, out);
        return out;
    }

    /**
     * Concrete answers of `query` over `store` and `kb`.
     *
     * Throws Error for knowledge bases that are neither range-restricted Horn nor
     * function-free.
     */
    inline GroundAnswerSet ground_answers(const FactStore &store, const std::vector<Clause> &kb,
                                          const DeductiveQuery &query, std::size_t depth_bound)
    {
        using namespace oracle_detail;

        // Candidate constants.
        std::set<SymbolId> constants;
        for (SymbolId c : store.active_domain())
            constants.insert(c);
        bool function_free = true;
        bool horn = true;
        std::vector<HornRule> rules;
        for (const Clause &c : kb)
        {
            HornRule r;
            std::size_t positives = 0;
            for (const Literal &l : c.literals)
            {
                for (const Term &t : l.args)
                {
                    constants_of(t, constants);
                    if (!t.is_var() && !t.args().empty())
                        function_free = false;
                }
                if (l.positive)
                {
                    ++positives;
                    r.head = l;
                }
                else
                    r.body.push_back(l.complement());
            }
            if (positives > 1)
                horn = false;
            if (r.head)
            {
                std::set<VarId> body_vars, head_vars;
                for (const Literal &b : r.body)
                    for (const Term &t : b.args)
                        vars_of(t, body_vars);
                for (const Term &t : r.head->args)
                    vars_of(t, head_vars);
                for (VarId v : head_vars)
                    if (!body_vars.count(v))
                        horn = false; // not range-restricted; fall back to grounding
            }
            rules.push_back(std::move(r));
        }
        // The goal: ~l1 | ... | ~ln. Forward chaining needs a positive conjunction.
        std::vector<Literal> conjunction;
        for (const Literal &l : query.goal.literals)
        {
            for (const Term &t : l.args)
            {
                constants_of(t, constants);
                if (!t.is_var() && !t.args().empty())
                    function_free = false;
            }
            if (l.positive)
                horn = false;
            conjunction.push_back(l.complement());
        }
        std::vector<SymbolId> domain(constants.begin(), constants.end());

        GroundAnswerSet result;
        const std::size_t k = query.distinguished.size();
        auto all_candidates = [&]
        {
            std::vector<VarId> slots;
            for (std::size_t i = 0; i < k; ++i)
                slots.push_back(static_cast<VarId>(i));
            for_each_assignment(slots, domain, [&](const Binding &b)
                                {
                std::vector<Term> tuple;
                for (std::size_t i = 0; i < k; ++i)
                    tuple.push_back(b.at(static_cast<VarId>(i)));
                result.tuples.insert(std::move(tuple)); });
        };

        if (horn)
        {
            Facts facts;
            for (const auto &[pred, rel] : store.relations())
                for (const Tuple &row : rel.rows)
                {
                    std::vector<Term> args;
                    for (SymbolId c : row)
                        args.push_back(Term::app(c));
                    facts[pred].insert(std::move(args));
                }
            Facts delta = facts;
            // Ground unit facts of the KB (range restriction makes them ground).
            for (const HornRule &r : rules)
                if (r.head && r.body.empty())
                {
                    Binding none;
                    std::vector<Term> args;
                    for (const Term &t : r.head->args)
                        args.push_back(ground(t, none));
                    if (atom_depth(args) > depth_bound)
                    {
                        result.exact = false;
                        continue;
                    }
                    if (facts[r.head->pred].insert(args).second)
                        delta[r.head->pred].insert(args);
                }
            while (!delta.empty())
            {
                Facts next;
                for (const HornRule &r : rules)
                {
                    if (!r.head || r.body.empty())
                        continue;
                    for (std::size_t pos = 0; pos < r.body.size(); ++pos)
                    {
                        if (!delta.count(r.body[pos].pred))
                            continue;
                        Binding b;
                        join(r.body, 0, facts, &delta, pos, b, [&](const Binding &sol)
                             {
                            std::vector<Term> args;
                            for (const Term &t : r.head->args)
                                args.push_back(ground(t, sol));
                            if (atom_depth(args) > depth_bound)
                            {
                                result.exact = false;
                                return;
                            }
                            if (!facts[r.head->pred].count(args))
                                next[r.head->pred].insert(std::move(args)); });
                    }
                }
                for (auto &[pred, rows] : next)
                    facts[pred].insert(rows.begin(), rows.end());
                delta = std::move(next);
            }

            bool inconsistent = false;
            for (const HornRule &r : rules)
            {
                if (r.head || inconsistent)
                    continue;
                Binding b;
                join(r.body, 0, facts, nullptr, 0, b, [&](const Binding &)
                     { inconsistent = true; });
            }
            if (inconsistent)
            {
                all_candidates();
                return result;
            }
            std::set<SymbolId> domain_set(domain.begin(), domain.end());
            Binding b;
            join(conjunction, 0, facts, nullptr, 0, b, [&](const Binding &sol)
                 {
                std::vector<Term> tuple;
                for (VarId v : query.distinguished)
                {
                    const Term &t = sol.at(v);
                    if (!t.is_constant() || !domain_set.count(t.functor()))
                        return;
                    tuple.push_back(t);
                }
                result.tuples.insert(std::move(tuple)); });
            return result;
        }

        if (!function_free)
            throw Error("oracle: knowledge base is neither range-restricted Horn nor function-free");

        if (domain.empty())
            return result; // no constants: no candidate tuples

        GroundAtoms atoms;
        std::vector<std::vector<int>> base;
        for (const auto &[pred, rel] : store.relations())
            for (const Tuple &row : rel.rows)
            {
                std::vector<Term> args;
                for (SymbolId c : row)
                    args.push_back(Term::app(c));
                base.push_back({atoms.id({pred, std::move(args)})});
            }
        for (const Clause &c : kb)
            for (auto &g : ground_clause(c.literals, domain, atoms))
                base.push_back(std::move(g));

        auto satisfiable = [&](const std::vector<std::vector<int>> &extra)
        {
            Dpll solver(atoms.size());
            for (const auto &c : base)
                solver.add(c);
            for (const auto &c : extra)
                solver.add(c);
            return solver.satisfiable();
        };
        // Ground the goal for each candidate first so every atom id exists.
        std::vector<VarId> slots;
        for (std::size_t i = 0; i < k; ++i)
            slots.push_back(static_cast<VarId>(i));
        std::vector<std::pair<std::vector<Term>, std::vector<std::vector<int>>>> candidates;
        for_each_assignment(slots, domain, [&](const Binding &b)
                            {
            Binding fixed;
            std::vector<Term> tuple;
            for (std::size_t i = 0; i < k; ++i)
            {
                fixed[query.distinguished[i]] = b.at(static_cast<VarId>(i));
                tuple.push_back(b.at(static_cast<VarId>(i)));
            }
            candidates.emplace_back(std::move(tuple), ground_clause(query.goal.literals, domain, atoms, fixed)); });

        if (!satisfiable({}))
        {
            all_candidates();
            return result;
        }
        for (auto &[tuple, goal] : candidates)
            if (!satisfiable(goal))
                result.tuples.insert(tuple);
        return result;
    }

} // namespace sa
