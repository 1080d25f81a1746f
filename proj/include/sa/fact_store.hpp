#pragma once

#include "term.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace sa
{

    struct Table
    {
        std::string name;
        std::vector<std::string> columns;
        SymbolId predicate;
    };

    /// Bijection between database predicates and tables with ordered columns.
    class Schema
    {
    public:
        /// Adds a table. Throws Error on a duplicate table/predicate or repeated column.
        void add_table(Table table)
        {
            if (by_name_.count(table.name))
                throw Error("duplicate table " + table.name);
            if (by_predicate_.count(table.predicate))
                throw Error("predicate of table " + table.name + " is already mapped");
            std::set<std::string> seen;
            for (const std::string &col : table.columns)
                if (!seen.insert(col).second)
                    throw Error("duplicate column " + col + " in table " + table.name);
            by_name_.emplace(table.name, tables_.size());
            by_predicate_.emplace(table.predicate, tables_.size());
            tables_.push_back(std::move(table));
        }

        const std::vector<Table> &tables() const { return tables_; }

        const Table *find_table(const std::string &name) const
        {
            auto it = by_name_.find(name);
            return it == by_name_.end() ? nullptr : &tables_[it->second];
        }

        const Table *table_for(SymbolId predicate) const
        {
            auto it = by_predicate_.find(predicate);
            return it == by_predicate_.end() ? nullptr : &tables_[it->second];
        }

        bool empty() const { return tables_.empty(); }

    private:
        std::vector<Table> tables_;
        std::map<std::string, std::size_t> by_name_;
        std::map<SymbolId, std::size_t> by_predicate_;
    };

    using Tuple = std::vector<SymbolId>;

    /**
     * The database as a set of ground atoms over constants. Tuples are kept in
     * insertion order; duplicates are dropped. Immutable once loaded, so
     * concurrent readers need no locking.
     */
    class FactStore
    {
    public:
        struct Relation
        {
            std::size_t arity = 0;
            std::vector<Tuple> rows;
            std::set<Tuple> members;
            // column -> constant -> row indices
            std::vector<std::unordered_map<SymbolId, std::vector<std::size_t>>> index;
        };

        /// Inserts a ground tuple; returns false if it was already present.
        bool insert(SymbolId predicate, Tuple tuple)
        {
            Relation &rel = relations_[predicate];
            if (rel.rows.empty() && rel.members.empty())
            {
                rel.arity = tuple.size();
                rel.index.resize(tuple.size());
            }
            if (tuple.size() != rel.arity)
                throw Error("tuple width does not match relation arity");
            if (!rel.members.insert(tuple).second)
                return false;
            for (std::size_t c = 0; c < tuple.size(); ++c)
                rel.index[c][tuple[c]].push_back(rel.rows.size());
            rel.rows.push_back(std::move(tuple));
            return true;
        }

        bool contains(SymbolId predicate, const Tuple &tuple) const
        {
            auto it = relations_.find(predicate);
            return it != relations_.end() && it->second.members.count(tuple);
        }

        const Relation *relation(SymbolId predicate) const
        {
            auto it = relations_.find(predicate);
            return it == relations_.end() ? nullptr : &it->second;
        }

        std::size_t size(SymbolId predicate) const
        {
            const Relation *r = relation(predicate);
            return r ? r->rows.size() : 0;
        }

        std::size_t size() const
        {
            std::size_t n = 0;
            for (const auto &[_, r] : relations_)
                n += r.rows.size();
            return n;
        }

        const std::map<SymbolId, Relation> &relations() const { return relations_; }

        /// Constants occurring anywhere in the store, in ascending id order.
        std::set<SymbolId> active_domain() const
        {
            std::set<SymbolId> out;
            for (const auto &[_, r] : relations_)
                for (const Tuple &t : r.rows)
                    out.insert(t.begin(), t.end());
            return out;
        }

    private:
        std::map<SymbolId, Relation> relations_;
    };

    // ------------------------------------------------------------------
    // Abstractions

    inline Clause make_abstraction(SymbolId predicate, std::vector<Term> args)
    {
        Clause c;
        Literal atom = Literal::pos(predicate, std::move(args));
        c.literals.push_back(atom);
        c.recording.push_back(atom);
        c.origin.kind = OriginKind::Abstraction;
        return c;
    }

    /// The simplest abstraction: p(X1..Xk) | p(X1..Xk) for every table.
    inline std::vector<Clause> build_abstraction(const Schema &schema)
    {
        std::vector<Clause> out;
        for (const Table &t : schema.tables())
        {
            std::vector<Term> args;
            for (std::size_t i = 0; i < t.columns.size(); ++i)
                args.push_back(Term::var(static_cast<VarId>(i)));
            out.push_back(make_abstraction(t.predicate, std::move(args)));
        }
        return out;
    }

    /**
     * Like build_abstraction, but the clause for `predicate` is replaced by one
     * clause per value with the 1-based `column` bound to that constant.
     */
    inline std::vector<Clause> refine_abstraction(const Schema &schema, SymbolId predicate,
                                                  std::size_t column, const std::vector<SymbolId> &values)
    {
        const Table *table = schema.table_for(predicate);
        if (!table)
            throw Error("refine_abstraction: predicate is not mapped to a table");
        if (column == 0 || column > table->columns.size())
            throw Error("refine_abstraction: column " + std::to_string(column) + " out of range for table " +
                        table->name);
        if (values.empty())
            throw Error("refine_abstraction: empty value list");
        std::vector<Clause> out;
        for (const Clause &c : build_abstraction(schema))
        {
            if (c.literals[0].pred != predicate)
            {
                out.push_back(c);
                continue;
            }
            for (SymbolId value : values)
            {
                std::vector<Term> args = c.literals[0].args;
                args[column - 1] = Term::app(value);
                out.push_back(make_abstraction(predicate, std::move(args)));
            }
        }
        return out;
    }

    // ------------------------------------------------------------------
    // Conjunctive constraints over the store

    /// True iff every argument of every atom is a variable or a constant.
    inline bool is_flat(const std::vector<Literal> &atoms)
    {
        for (const Literal &l : atoms)
            for (const Term &t : l.args)
                if (!t.is_var() && !t.is_constant())
                    return false;
        return true;
    }

    namespace detail
    {

        struct ConstraintJoin
        {
            const FactStore &store;
            const std::vector<Literal> &atoms;
            std::map<VarId, SymbolId> binding;
            const std::function<bool(const std::map<VarId, SymbolId> &)> &emit;

            // Returns false when the consumer asked to stop.
            bool run(std::size_t k)
            {
                if (k == atoms.size())
                    return emit(binding);
                const Literal &atom = atoms[k];
                const FactStore::Relation *rel = store.relation(atom.pred);
                if (!rel || rel->arity != atom.args.size())
                    return true;

                // Narrow the scan with the first argument whose value is known.
                const std::vector<std::size_t> *candidates = nullptr;
                bool indexed = false;
                for (std::size_t c = 0; c < atom.args.size() && !indexed; ++c)
                {
                    std::optional<SymbolId> value = known(atom.args[c]);
                    if (!value)
                        continue;
                    indexed = true;
                    auto it = rel->index[c].find(*value);
                    if (it == rel->index[c].end())
                        return true;
                    candidates = &it->second;
                }

                auto visit = [&](const Tuple &row) -> bool
                {
                    std::vector<VarId> bound_here;
                    bool ok = true;
                    for (std::size_t c = 0; c < row.size() && ok; ++c)
                    {
                        const Term &arg = atom.args[c];
                        if (arg.is_var())
                        {
                            auto it = binding.find(arg.var_id());
                            if (it == binding.end())
                            {
                                binding.emplace(arg.var_id(), row[c]);
                                bound_here.push_back(arg.var_id());
                            }
                            else
                                ok = it->second == row[c];
                        }
                        else
                            ok = arg.functor() == row[c];
                    }
                    bool go_on = true;
                    if (ok)
                        go_on = run(k + 1);
                    for (VarId v : bound_here)
                        binding.erase(v);
                    return go_on;
                };

                if (indexed)
                {
                    for (std::size_t r : *candidates)
                        if (!visit(rel->rows[r]))
                            return false;
                }
                else
                {
                    for (const Tuple &row : rel->rows)
                        if (!visit(row))
                            return false;
                }
                return true;
            }

            std::optional<SymbolId> known(const Term &t) const
            {
                if (!t.is_var())
                    return t.functor();
                auto it = binding.find(t.var_id());
                if (it == binding.end())
                    return std::nullopt;
                return it->second;
            }
        };

    } // namespace detail

    /**
     * Enumerates the solutions of a conjunction of database atoms: bindings of
     * the atoms' variables to constants with every instantiated atom in the
     * store. Atoms are joined left to right. The callback returns false to stop.
     * Throws UnsupportedConstraint if an argument is a compound term.
     */
    inline void for_each_solution(const FactStore &store, const std::vector<Literal> &atoms,
                                  const std::function<bool(const std::map<VarId, SymbolId> &)> &emit)
    {
        if (!is_flat(atoms))
            throw UnsupportedConstraint("constraint contains a compound term");
        detail::ConstraintJoin join{store, atoms, {}, emit};
        join.run(0);
    }

    /// All distinct solutions, as substitutions over the atoms' variables.
    inline std::vector<Substitution> solve_constraint(const FactStore &store, const std::vector<Literal> &atoms)
    {
        std::vector<VarId> vars;
        for (const Literal &l : atoms)
            collect_vars(l, vars);
        std::set<Tuple> seen;
        std::vector<Substitution> out;
        for_each_solution(store, atoms, [&](const std::map<VarId, SymbolId> &b)
                          {
            Tuple key;
            key.reserve(vars.size());
            for (VarId v : vars)
                key.push_back(b.at(v));
            if (seen.insert(key).second)
            {
                Substitution s;
                for (std::size_t i = 0; i < vars.size(); ++i)
                    s.bind(vars[i], Term::app(key[i]));
                out.push_back(std::move(s));
            }
            return true; });
        return out;
    }

    /// True iff the conjunction has a solution; stops at the first one.
    inline bool constraint_satisfiable(const FactStore &store, const std::vector<Literal> &atoms)
    {
        bool found = false;
        for_each_solution(store, atoms, [&](const std::map<VarId, SymbolId> &)
                          {
            found = true;
            return false; });
        return found;
    }

} // namespace sa
