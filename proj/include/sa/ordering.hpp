#pragma once

#include "term.hpp"

#include <map>
#include <vector>

namespace sa
{

    enum class Calculus
    {
        Unordered,
        Ordered,
        OrderedSelection
    };

    enum class Comparison
    {
        Greater,
        Less,
        Equal,
        Incomparable
    };

    /**
     * Knuth-Bendix ordering with every symbol and variable of weight 1.
     * Precedence is declaration order: a symbol declared earlier (smaller id) is
     * greater. Predicates and function symbols have separate precedences since
     * they never meet at the same position.
     */
    class KboOrdering
    {
    public:
        Comparison compare(const Term &s, const Term &t) const
        {
            if (s == t)
                return Comparison::Equal;
            if (greater(s, t))
                return Comparison::Greater;
            if (greater(t, s))
                return Comparison::Less;
            return Comparison::Incomparable;
        }

        /// Compares the atoms of two literals, ignoring polarity.
        Comparison compare_atoms(const Literal &a, const Literal &b) const
        {
            if (a.same_atom(b))
                return Comparison::Equal;
            if (atom_greater(a, b))
                return Comparison::Greater;
            if (atom_greater(b, a))
                return Comparison::Less;
            return Comparison::Incomparable;
        }

        /// Literal ordering: atoms first; on equal atoms ~A > A.
        Comparison compare(const Literal &a, const Literal &b) const
        {
            Comparison c = compare_atoms(a, b);
            if (c != Comparison::Equal)
                return c;
            if (a.positive == b.positive)
                return Comparison::Equal;
            return a.positive ? Comparison::Less : Comparison::Greater;
        }

        bool greater(const Term &s, const Term &t) const
        {
            if (s.is_var())
                return false;
            if (t.is_var())
                return s.contains_var(t.var_id());
            std::map<VarId, long> balance;
            count_vars(s, balance, 1);
            count_vars(t, balance, -1);
            for (const auto &[v, n] : balance)
                if (n < 0)
                    return false;
            std::size_t ws = s.weight(), wt = t.weight();
            if (ws != wt)
                return ws > wt;
            if (s.functor() != t.functor())
                return s.functor() < t.functor();
            return lex_greater(s.args(), t.args());
        }

    private:
        static void count_vars(const Term &t, std::map<VarId, long> &balance, long delta)
        {
            if (t.is_var())
            {
                balance[t.var_id()] += delta;
                return;
            }
            for (const Term &a : t.args())
                count_vars(a, balance, delta);
        }

        bool lex_greater(const std::vector<Term> &s, const std::vector<Term> &t) const
        {
            for (std::size_t i = 0; i < s.size() && i < t.size(); ++i)
            {
                if (s[i] == t[i])
                    continue;
                return greater(s[i], t[i]);
            }
            return false;
        }

        bool atom_greater(const Literal &a, const Literal &b) const
        {
            std::map<VarId, long> balance;
            for (const Term &t : a.args)
                count_vars(t, balance, 1);
            for (const Term &t : b.args)
                count_vars(t, balance, -1);
            for (const auto &[v, n] : balance)
                if (n < 0)
                    return false;
            std::size_t wa = a.weight(), wb = b.weight();
            if (wa != wb)
                return wa > wb;
            if (a.pred != b.pred)
                return a.pred < b.pred;
            return lex_greater(a.args, b.args);
        }
    };

    namespace detail
    {
        /// Positions in `candidates` whose literal is not strictly dominated by another candidate.
        inline std::vector<std::size_t> maximal_among(const std::vector<Literal> &lits,
                                                      const std::vector<std::size_t> &candidates,
                                                      const KboOrdering &ord)
        {
            std::vector<std::size_t> out;
            for (std::size_t i : candidates)
            {
                bool dominated = false;
                for (std::size_t j : candidates)
                {
                    if (i != j && ord.compare(lits[j], lits[i]) == Comparison::Greater)
                    {
                        dominated = true;
                        break;
                    }
                }
                if (!dominated)
                    out.push_back(i);
            }
            return out;
        }
    } // namespace detail

    /**
     * Ordinary-literal positions that inferences may use.
     *
     * Unordered: every literal. Ordered: maximal literals. OrderedSelection: if the
     * clause has a negative literal, every negative literal maximal among the
     * negative ones; otherwise the maximal literals.
     */
    inline std::vector<std::size_t> eligible_literals(const Clause &c, Calculus calculus,
                                                      const KboOrdering &ord = {})
    {
        std::vector<std::size_t> all;
        for (std::size_t i = 0; i < c.literals.size(); ++i)
            all.push_back(i);
        switch (calculus)
        {
        case Calculus::Unordered:
            return all;
        case Calculus::Ordered:
            return detail::maximal_among(c.literals, all, ord);
        case Calculus::OrderedSelection:
        {
            std::vector<std::size_t> negatives;
            for (std::size_t i : all)
                if (!c.literals[i].positive)
                    negatives.push_back(i);
            if (negatives.empty())
                return detail::maximal_among(c.literals, all, ord);
            return detail::maximal_among(c.literals, negatives, ord);
        }
        }
        return all;
    }

} // namespace sa
