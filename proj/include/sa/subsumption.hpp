#pragma once

#include "unify.hpp"

#include <algorithm>
#include <map>
#include <vector>

namespace sa
{

    namespace detail
    {

        struct SubsumptionSearch
        {
            // patterns[k] = (literal, part index 0 = ordinary, 1 = recording)
            std::vector<std::pair<const Literal *, int>> patterns;
            const std::vector<Literal> *targets[2];
            std::vector<bool> used[2];
            const Clause *general;
            const Clause *specific;

            bool prefixes_ok(const Substitution &s) const
            {
                for (const PrefixConstraint &p : general->prefixes)
                {
                    PrefixConstraint inst{s.apply(p.term), p.prefix};
                    if (std::find(specific->prefixes.begin(), specific->prefixes.end(), inst) ==
                        specific->prefixes.end())
                        return false;
                }
                return true;
            }

            bool run(std::size_t k, const Substitution &s)
            {
                if (k == patterns.size())
                    return prefixes_ok(s);
                const auto [pattern, part] = patterns[k];
                const std::vector<Literal> &ts = *targets[part];
                for (std::size_t i = 0; i < ts.size(); ++i)
                {
                    if (used[part][i])
                        continue;
                    Substitution next = s;
                    if (!match_into(next, *pattern, ts[i]))
                        continue;
                    used[part][i] = true;
                    bool ok = run(k + 1, next);
                    used[part][i] = false;
                    if (ok)
                        return true;
                }
                return false;
            }
        };

        inline bool predicate_counts_fit(const std::vector<Literal> &small, const std::vector<Literal> &big)
        {
            std::map<std::pair<SymbolId, bool>, int> counts;
            for (const Literal &l : big)
                ++counts[{l.pred, l.positive}];
            for (const Literal &l : small)
                if (--counts[{l.pred, l.positive}] < 0)
                    return false;
            return true;
        }

    } // namespace detail

    /**
     * Multiset subsumption of clauses with recording literals: true iff some theta
     * maps the ordinary part of `general` into a submultiset of the ordinary part
     * of `specific` and, with the same theta, the recording part into a
     * submultiset of the recording part. Prefix constraints of `general` must
     * reappear (instantiated) in `specific`.
     */
    inline bool subsumes(const Clause &general, const Clause &specific)
    {
        if (general.literals.size() > specific.literals.size() ||
            general.recording.size() > specific.recording.size())
            return false;
        if (!detail::predicate_counts_fit(general.literals, specific.literals) ||
            !detail::predicate_counts_fit(general.recording, specific.recording))
            return false;

        detail::SubsumptionSearch search;
        search.general = &general;
        search.specific = &specific;
        search.targets[0] = &specific.literals;
        search.targets[1] = &specific.recording;
        search.used[0].assign(specific.literals.size(), false);
        search.used[1].assign(specific.recording.size(), false);
        for (const Literal &l : general.literals)
            search.patterns.emplace_back(&l, 0);
        for (const Literal &l : general.recording)
            search.patterns.emplace_back(&l, 1);
        // Heavier literals first: they bind more and fail sooner.
        std::stable_sort(search.patterns.begin(), search.patterns.end(),
                         [](const auto &a, const auto &b)
                         { return a.first->weight() > b.first->weight(); });
        return search.run(0, Substitution{});
    }

    /// Equal up to variable renaming (as multisets).
    inline bool is_variant(const Clause &a, const Clause &b)
    {
        return a.literals.size() == b.literals.size() && a.recording.size() == b.recording.size() &&
               a.prefixes.size() == b.prefixes.size() && a.weight() == b.weight() &&
               subsumes(a, b) && subsumes(b, a);
    }

} // namespace sa
