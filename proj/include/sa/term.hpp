#pragma once

#include "symbols.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace sa
{

    using VarId = std::uint32_t;
    using ClauseId = std::uint32_t;

    /// A first-order term: a variable or a function symbol applied to arguments.
    /// Constants are applications of arity-0 symbols.
    class Term
    {
    public:
        Term() : is_var_(true), id_(0) {}

        static Term var(VarId id) { return Term(true, id, {}); }
        static Term app(SymbolId functor, std::vector<Term> args = {})
        {
            return Term(false, functor, std::move(args));
        }

        bool is_var() const { return is_var_; }
        bool is_constant() const { return !is_var_ && args_.empty(); }
        VarId var_id() const { return id_; }
        SymbolId functor() const { return id_; }
        const std::vector<Term> &args() const { return args_; }
        std::vector<Term> &args() { return args_; }

        bool is_ground() const
        {
            if (is_var_)
                return false;
            return std::all_of(args_.begin(), args_.end(), [](const Term &t)
                               { return t.is_ground(); });
        }

        bool contains_var(VarId v) const
        {
            if (is_var_)
                return id_ == v;
            return std::any_of(args_.begin(), args_.end(), [v](const Term &t)
                               { return t.contains_var(v); });
        }

        /// Number of symbol and variable occurrences.
        std::size_t weight() const
        {
            std::size_t w = 1;
            for (const Term &a : args_)
                w += a.weight();
            return w;
        }

        /// Nesting depth; variables and constants have depth 0.
        std::size_t depth() const
        {
            std::size_t d = 0;
            for (const Term &a : args_)
                d = std::max(d, a.depth() + 1);
            return d;
        }

        friend bool operator==(const Term &a, const Term &b)
        {
            return a.is_var_ == b.is_var_ && a.id_ == b.id_ && a.args_ == b.args_;
        }
        friend bool operator!=(const Term &a, const Term &b) { return !(a == b); }

        // Arbitrary total order, used for canonical sorting and set keys.
        friend bool operator<(const Term &a, const Term &b)
        {
            if (a.is_var_ != b.is_var_)
                return a.is_var_;
            if (a.id_ != b.id_)
                return a.id_ < b.id_;
            return std::lexicographical_compare(a.args_.begin(), a.args_.end(),
                                                b.args_.begin(), b.args_.end());
        }

    private:
        Term(bool is_var, std::uint32_t id, std::vector<Term> args)
            : is_var_(is_var), id_(id), args_(std::move(args)) {}

        bool is_var_;
        std::uint32_t id_;
        std::vector<Term> args_;
    };

    struct Literal
    {
        bool positive = true;
        SymbolId pred = 0;
        std::vector<Term> args;

        Literal() = default;
        Literal(bool positive, SymbolId pred, std::vector<Term> args)
            : positive(positive), pred(pred), args(std::move(args)) {}

        static Literal pos(SymbolId pred, std::vector<Term> args) { return {true, pred, std::move(args)}; }
        static Literal neg(SymbolId pred, std::vector<Term> args) { return {false, pred, std::move(args)}; }

        Literal complement() const { return {!positive, pred, args}; }

        bool same_atom(const Literal &o) const { return pred == o.pred && args == o.args; }

        std::size_t weight() const
        {
            std::size_t w = 1;
            for (const Term &a : args)
                w += a.weight();
            return w;
        }

        friend bool operator==(const Literal &a, const Literal &b)
        {
            return a.positive == b.positive && a.pred == b.pred && a.args == b.args;
        }
        friend bool operator!=(const Literal &a, const Literal &b) { return !(a == b); }
        friend bool operator<(const Literal &a, const Literal &b)
        {
            if (a.pred != b.pred)
                return a.pred < b.pred;
            if (a.positive != b.positive)
                return a.positive < b.positive;
            return std::lexicographical_compare(a.args.begin(), a.args.end(),
                                                b.args.begin(), b.args.end());
        }
    };

    /// URI-prefix constraint on a term of an abstraction clause (document index).
    struct PrefixConstraint
    {
        Term term;
        std::string prefix;

        friend bool operator==(const PrefixConstraint &a, const PrefixConstraint &b)
        {
            return a.term == b.term && a.prefix == b.prefix;
        }
        friend bool operator<(const PrefixConstraint &a, const PrefixConstraint &b)
        {
            if (a.term != b.term)
                return a.term < b.term;
            return a.prefix < b.prefix;
        }
    };

    enum class OriginKind
    {
        Kb,
        Goal,
        Abstraction,
        Derived
    };

    struct Origin
    {
        OriginKind kind = OriginKind::Kb;
        std::string rule;                // derived clauses only
        std::vector<ClauseId> premises;  // derived clauses only
        std::string document;            // abstraction clauses coming from a document index
    };

    /**
     * A clause with recording literals, C | gamma.
     *
     * `literals` is the ordinary part C and `recording` the recording part gamma; both
     * are multisets kept as vectors. Semantically the clause reads
     * C \/ ~l1 \/ ... \/ ~ln for recording literals l1..ln.
     */
    struct Clause
    {
        std::vector<Literal> literals;
        std::vector<Literal> recording;
        std::vector<PrefixConstraint> prefixes;
        Origin origin;

        bool empty_ordinary() const { return literals.empty(); }

        std::size_t weight() const
        {
            std::size_t w = 0;
            for (const Literal &l : literals)
                w += l.weight();
            for (const Literal &l : recording)
                w += l.weight();
            return w;
        }
    };

    inline void collect_vars(const Term &t, std::vector<VarId> &out)
    {
        if (t.is_var())
        {
            if (std::find(out.begin(), out.end(), t.var_id()) == out.end())
                out.push_back(t.var_id());
            return;
        }
        for (const Term &a : t.args())
            collect_vars(a, out);
    }

    inline void collect_vars(const Literal &l, std::vector<VarId> &out)
    {
        for (const Term &a : l.args)
            collect_vars(a, out);
    }

    /// Variables in first-occurrence order: ordinary part, recording part, prefixes.
    inline std::vector<VarId> clause_vars(const Clause &c)
    {
        std::vector<VarId> out;
        for (const Literal &l : c.literals)
            collect_vars(l, out);
        for (const Literal &l : c.recording)
            collect_vars(l, out);
        for (const PrefixConstraint &p : c.prefixes)
            collect_vars(p.term, out);
        return out;
    }

    /// One past the largest variable id occurring in the clause.
    inline VarId var_bound(const Clause &c)
    {
        VarId bound = 0;
        for (VarId v : clause_vars(c))
            bound = std::max(bound, v + 1);
        return bound;
    }

    // ------------------------------------------------------------------
    // Substitutions

    /// Finite map from variables to terms. Kept idempotent by the unifier.
    class Substitution
    {
    public:
        using Map = std::map<VarId, Term>;

        Substitution() = default;

        bool empty() const { return map_.empty(); }
        std::size_t size() const { return map_.size(); }
        const Map &bindings() const { return map_; }

        const Term *lookup(VarId v) const
        {
            auto it = map_.find(v);
            return it == map_.end() ? nullptr : &it->second;
        }

        void bind(VarId v, Term t) { map_[v] = std::move(t); }

        Term apply(const Term &t) const
        {
            if (t.is_var())
            {
                const Term *b = lookup(t.var_id());
                return b ? *b : t;
            }
            if (t.args().empty())
                return t;
            std::vector<Term> args;
            args.reserve(t.args().size());
            for (const Term &a : t.args())
                args.push_back(apply(a));
            return Term::app(t.functor(), std::move(args));
        }

        Literal apply(const Literal &l) const
        {
            Literal out{l.positive, l.pred, {}};
            out.args.reserve(l.args.size());
            for (const Term &a : l.args)
                out.args.push_back(apply(a));
            return out;
        }

        std::vector<Literal> apply(const std::vector<Literal> &ls) const
        {
            std::vector<Literal> out;
            out.reserve(ls.size());
            for (const Literal &l : ls)
                out.push_back(apply(l));
            return out;
        }

        /// Instantiates both parts (and prefix constraints) uniformly. Origin is kept.
        Clause apply(const Clause &c) const
        {
            Clause out;
            out.literals = apply(c.literals);
            out.recording = apply(c.recording);
            out.prefixes.reserve(c.prefixes.size());
            for (const PrefixConstraint &p : c.prefixes)
                out.prefixes.push_back({apply(p.term), p.prefix});
            out.origin = c.origin;
            return out;
        }

        bool is_idempotent() const
        {
            for (const auto &[v, t] : map_)
                for (const auto &[w, _] : map_)
                    if (t.contains_var(w))
                        return false;
            return true;
        }

        friend bool operator==(const Substitution &a, const Substitution &b) { return a.map_ == b.map_; }

    private:
        Map map_;
    };

    /// Shifts every variable by `offset`; used to rename premises apart.
    inline Clause shift_vars(const Clause &c, VarId offset)
    {
        if (offset == 0)
            return c;
        Substitution s;
        for (VarId v : clause_vars(c))
            s.bind(v, Term::var(v + offset));
        return s.apply(c);
    }

    /**
     * Renumbers variables 0,1,2,... in first-occurrence order. Returns the renaming
     * applied (old variable -> new variable).
     */
    inline Substitution normalize_vars(Clause &c)
    {
        Substitution renaming;
        VarId next = 0;
        for (VarId v : clause_vars(c))
            renaming.bind(v, Term::var(next++));
        c = renaming.apply(c);
        return renaming;
    }

    // ------------------------------------------------------------------
    // Printing

    inline bool is_plain_constant_name(const std::string &name)
    {
        if (name.empty())
            return false;
        bool digits = std::all_of(name.begin(), name.end(), [](unsigned char ch)
                                  { return std::isdigit(ch); });
        if (digits)
            return true;
        if (!std::islower(static_cast<unsigned char>(name[0])))
            return false;
        for (std::size_t i = 0; i < name.size(); ++i)
        {
            unsigned char ch = static_cast<unsigned char>(name[i]);
            if (std::isalnum(ch) || ch == '_')
                continue;
            // ':' only between identifier characters, as in zoo:elephant
            if (ch == ':' && i + 1 < name.size() &&
                (std::isalnum(static_cast<unsigned char>(name[i + 1])) || name[i + 1] == '_'))
                continue;
            return false;
        }
        return true;
    }

    inline std::string quote_symbol(const std::string &name)
    {
        if (is_plain_constant_name(name))
            return name;
        std::string out = "'";
        for (char ch : name)
        {
            if (ch == '\'' || ch == '\\')
                out += '\\';
            out += ch;
        }
        return out + "'";
    }

    using VarNamer = std::function<std::string(VarId)>;

    inline std::string default_var_name(VarId v) { return "X" + std::to_string(v); }

    inline std::string to_string(const Term &t, const SymbolTable &symbols,
                                 const VarNamer &namer = default_var_name)
    {
        if (t.is_var())
            return namer(t.var_id());
        std::string out = quote_symbol(symbols.func(t.functor()).name);
        if (t.args().empty())
            return out;
        out += '(';
        for (std::size_t i = 0; i < t.args().size(); ++i)
        {
            if (i)
                out += ',';
            out += to_string(t.args()[i], symbols, namer);
        }
        return out + ')';
    }

    inline std::string atom_to_string(const Literal &l, const SymbolTable &symbols,
                                      const VarNamer &namer = default_var_name)
    {
        std::string out = symbols.pred(l.pred).name;
        if (l.args.empty())
            return out;
        out += '(';
        for (std::size_t i = 0; i < l.args.size(); ++i)
        {
            if (i)
                out += ',';
            out += to_string(l.args[i], symbols, namer);
        }
        return out + ')';
    }

    inline std::string to_string(const Literal &l, const SymbolTable &symbols,
                                 const VarNamer &namer = default_var_name)
    {
        return (l.positive ? "" : "~") + atom_to_string(l, symbols, namer);
    }

    /// Renders `C | gamma`, with `[]` for an empty ordinary part.
    inline std::string to_string(const Clause &c, const SymbolTable &symbols,
                                 const VarNamer &namer = default_var_name)
    {
        std::string out;
        if (c.literals.empty())
            out = "[]";
        for (std::size_t i = 0; i < c.literals.size(); ++i)
        {
            if (i)
                out += " | ";
            out += to_string(c.literals[i], symbols, namer);
        }
        if (!c.recording.empty() || !c.prefixes.empty())
        {
            out += " || ";
            bool first = true;
            for (const Literal &l : c.recording)
            {
                if (!first)
                    out += ", ";
                first = false;
                out += to_string(l, symbols, namer);
            }
            for (const PrefixConstraint &p : c.prefixes)
            {
                if (!first)
                    out += ", ";
                first = false;
                out += "pref(" + to_string(p.term, symbols, namer) + ",\"" + p.prefix + "\")";
            }
        }
        return out;
    }

    /// Renders a clause with empty recording part in the knowledge-base file syntax.
    inline std::string to_kb_string(const Clause &c, const SymbolTable &symbols)
    {
        std::string out;
        for (std::size_t i = 0; i < c.literals.size(); ++i)
        {
            if (i)
                out += " | ";
            out += to_string(c.literals[i], symbols);
        }
        return out + ".";
    }

} // namespace sa
