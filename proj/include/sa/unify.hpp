#pragma once

#include "term.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace sa
{

    namespace detail
    {

        inline bool occurs(VarId v, const Term &t) { return t.contains_var(v); }

        /// Composes {v -> t} into an idempotent substitution.
        inline void extend(Substitution &s, VarId v, const Term &t)
        {
            Substitution single;
            single.bind(v, t);
            Substitution::Map updated;
            for (const auto &[w, u] : s.bindings())
                updated.emplace(w, single.apply(u));
            Substitution next;
            for (auto &[w, u] : updated)
                next.bind(w, std::move(u));
            next.bind(v, t);
            s = std::move(next);
        }

    } // namespace detail

    /**
     * Robinson unification with occurs check, extending `s` in place.
     * `s` must be idempotent on entry and stays idempotent. On failure `s` is
     * left in an unspecified state.
     */
    inline bool unify_into(Substitution &s, const Term &a, const Term &b)
    {
        std::vector<std::pair<Term, Term>> todo;
        todo.emplace_back(a, b);
        while (!todo.empty())
        {
            auto [x, y] = std::move(todo.back());
            todo.pop_back();
            x = s.apply(x);
            y = s.apply(y);
            if (x == y)
                continue;
            if (!x.is_var() && y.is_var())
                std::swap(x, y);
            if (x.is_var())
            {
                if (detail::occurs(x.var_id(), y))
                    return false;
                detail::extend(s, x.var_id(), y);
                continue;
            }
            if (x.functor() != y.functor() || x.args().size() != y.args().size())
                return false;
            for (std::size_t i = 0; i < x.args().size(); ++i)
                todo.emplace_back(x.args()[i], y.args()[i]);
        }
        return true;
    }

    /// Unifies the atoms of two literals (polarity is ignored).
    inline bool unify_atoms_into(Substitution &s, const Literal &a, const Literal &b)
    {
        if (a.pred != b.pred || a.args.size() != b.args.size())
            return false;
        for (std::size_t i = 0; i < a.args.size(); ++i)
            if (!unify_into(s, a.args[i], b.args[i]))
                return false;
        return true;
    }

    /// Most general unifier of two atoms, or nullopt.
    inline std::optional<Substitution> unify(const Literal &a, const Literal &b)
    {
        Substitution s;
        if (!unify_atoms_into(s, a, b))
            return std::nullopt;
        return s;
    }

    inline std::optional<Substitution> unify(const Term &a, const Term &b)
    {
        Substitution s;
        if (!unify_into(s, a, b))
            return std::nullopt;
        return s;
    }

    /// Simultaneous mgu of a nonempty list of atoms, folding pairwise left to right.
    inline std::optional<Substitution> simultaneous_mgu(const std::vector<Literal> &atoms)
    {
        Substitution s;
        for (std::size_t i = 1; i < atoms.size(); ++i)
            if (!unify_atoms_into(s, atoms[0], atoms[i]))
                return std::nullopt;
        return s;
    }

    /**
     * One-way matching: extends `s` so that pattern*s == target. Only variables
     * of the pattern are bound; target variables are treated as constants.
     */
    inline bool match_into(Substitution &s, const Term &pattern, const Term &target)
    {
        if (pattern.is_var())
        {
            if (const Term *bound = s.lookup(pattern.var_id()))
                return *bound == target;
            s.bind(pattern.var_id(), target);
            return true;
        }
        if (target.is_var() || pattern.functor() != target.functor() ||
            pattern.args().size() != target.args().size())
            return false;
        for (std::size_t i = 0; i < pattern.args().size(); ++i)
            if (!match_into(s, pattern.args()[i], target.args()[i]))
                return false;
        return true;
    }

    inline bool match_into(Substitution &s, const Literal &pattern, const Literal &target)
    {
        if (pattern.positive != target.positive || pattern.pred != target.pred ||
            pattern.args.size() != target.args.size())
            return false;
        for (std::size_t i = 0; i < pattern.args.size(); ++i)
            if (!match_into(s, pattern.args[i], target.args[i]))
                return false;
        return true;
    }

} // namespace sa
