#pragma once

// Turns schematic answers [] | D, ~A1, ..., ~An into SQL and concrete answers:
// case analysis, merging of answer literals, projection onto the variables shared
// with D, flattening into equality conditions over fresh column variables, and
// rendering as SELECT ... FROM ... WHERE ... with one alias per literal of D.

#include "fact_store.hpp"
#include "saturation.hpp"
#include "unify.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sa
{

    enum class AnswerCase
    {
        KbRefutation,      // no database literals, no answer literals
        PureAnswer,        // answer literals only
        KbDbInconsistency, // database literals only
        Standard
    };

    inline const char *to_string(AnswerCase c)
    {
        switch (c)
        {
        case AnswerCase::KbRefutation:
            return "kb-refutation";
        case AnswerCase::PureAnswer:
            return "pure-answer";
        case AnswerCase::KbDbInconsistency:
            return "kb-db-inconsistency";
        case AnswerCase::Standard:
            return "standard";
        }
        return "?";
    }

    inline AnswerCase classify_case(const Clause &answer)
    {
        std::size_t db = 0, at = 0;
        for (const Literal &l : answer.recording)
            (l.positive ? db : at) += 1;
        if (db == 0)
            return at == 0 ? AnswerCase::KbRefutation : AnswerCase::PureAnswer;
        return at == 0 ? AnswerCase::KbDbInconsistency : AnswerCase::Standard;
    }

    inline AnswerCase classify_case(const SchematicAnswer &sa) { return classify_case(sa.clause); }

    /**
     * Applies the simultaneous mgu of the answer literals and keeps only the first
     * of them: [] | D theta, ~A1 theta. Returns nullopt when the answer literals do
     * not unify (the schematic answer has no instances).
     */
    inline std::optional<Clause> merge_answer_literals(const Clause &answer)
    {
        std::vector<Literal> atoms = answer_atoms(answer);
        if (atoms.empty())
            return answer;
        std::optional<Substitution> theta = simultaneous_mgu(atoms);
        if (!theta)
            return std::nullopt;
        Clause out;
        out.origin = answer.origin;
        bool have_answer = false;
        for (const Literal &l : answer.recording)
        {
            if (!l.positive)
            {
                if (have_answer)
                    continue;
                have_answer = true;
            }
            out.recording.push_back(theta->apply(l));
        }
        for (const PrefixConstraint &p : answer.prefixes)
            out.prefixes.push_back({theta->apply(p.term), p.prefix});
        return out;
    }

    /// Schematic answer restricted to answer variables that occur in D, plus the
    /// terms of the original answer literal for rebuilding full answers.
    struct CoreAnswer
    {
        std::vector<Literal> constraint;  // D
        std::vector<VarId> answer_vars;   // pairwise distinct, each occurring in D
        std::vector<Term> answer_terms;   // arguments of the original answer literal
    };

    /**
     * `merged` must hold at most one answer literal. The literals of D are put in
     * predicate declaration order (stable), so table aliases follow the schema
     * rather than the order in which the derivation happened to add them.
     */
    inline CoreAnswer normalize_answer(const Clause &merged)
    {
        CoreAnswer core;
        core.constraint = database_literals(merged);
        std::stable_sort(core.constraint.begin(), core.constraint.end(), [](const Literal &a, const Literal &b)
                         { return a.pred < b.pred; });
        std::vector<Literal> atoms = answer_atoms(merged);
        if (atoms.size() > 1)
            throw Error("normalize_answer: more than one answer literal");
        if (atoms.empty())
            return core;
        core.answer_terms = atoms[0].args;
        std::vector<VarId> in_d;
        for (const Literal &l : core.constraint)
            collect_vars(l, in_d);
        std::vector<VarId> in_a;
        for (const Term &t : core.answer_terms)
            collect_vars(t, in_a);
        for (VarId v : in_a)
            if (std::find(in_d.begin(), in_d.end(), v) != in_d.end())
                core.answer_vars.push_back(v);
        return core;
    }

    /// 1-based (literal, column) position in D.
    struct Position
    {
        std::size_t literal;
        std::size_t column;

        friend bool operator==(const Position &a, const Position &b)
        {
            return a.literal == b.literal && a.column == b.column;
        }
        friend bool operator<(const Position &a, const Position &b)
        {
            return a.literal != b.literal ? a.literal < b.literal : a.column < b.column;
        }
    };

    struct ConstantCondition
    {
        Position at;
        SymbolId constant;
    };

    struct LinkCondition
    {
        Position first;
        Position second;
    };

    /**
     * Flat normal form E_a \/ E_c \/ E_d \/ D_x \/ A of a core answer.
     * D_x repeats the predicates of D over fresh, pairwise distinct variables.
     */
    struct FlattenedAnswer
    {
        std::vector<VarId> answer_vars;        // A
        std::vector<Literal> tables;           // D_x
        std::vector<Position> answer_columns;  // E_a, parallel to answer_vars
        std::vector<ConstantCondition> constants; // E_c
        std::vector<LinkCondition> links;      // E_d
    };

    /**
     * Returns nullopt when some argument of D is a compound term; such a
     * schematic answer has no instances over a database of constants.
     *
     * E_a binds each answer variable to its smallest occurrence. E_d links the
     * occurrences of every variable along a path in ascending order, variables
     * taken in order of first occurrence.
     */
    inline std::optional<FlattenedAnswer> flatten(const CoreAnswer &core)
    {
        if (!is_flat(core.constraint))
            return std::nullopt;
        FlattenedAnswer flat;
        flat.answer_vars = core.answer_vars;

        VarId fresh = 0;
        for (const Literal &l : core.constraint)
            for (const Term &t : l.args)
                if (t.is_var())
                    fresh = std::max(fresh, t.var_id() + 1);
        for (VarId v : core.answer_vars)
            fresh = std::max(fresh, v + 1);

        std::vector<VarId> order;
        std::map<VarId, std::vector<Position>> occurrences;
        for (std::size_t i = 0; i < core.constraint.size(); ++i)
        {
            const Literal &l = core.constraint[i];
            Literal column_lit = Literal::pos(l.pred, {});
            for (std::size_t j = 0; j < l.args.size(); ++j)
            {
                column_lit.args.push_back(Term::var(fresh++));
                Position p{i + 1, j + 1};
                const Term &t = l.args[j];
                if (t.is_var())
                {
                    auto &occ = occurrences[t.var_id()];
                    if (occ.empty())
                        order.push_back(t.var_id());
                    occ.push_back(p);
                }
                else
                    flat.constants.push_back({p, t.functor()});
            }
            flat.tables.push_back(std::move(column_lit));
        }
        for (VarId v : core.answer_vars)
        {
            auto it = occurrences.find(v);
            if (it == occurrences.end())
                throw Error("flatten: answer variable does not occur in the constraint");
            flat.answer_columns.push_back(it->second.front());
        }
        for (VarId v : order)
        {
            const auto &occ = occurrences[v];
            for (std::size_t k = 1; k < occ.size(); ++k)
                flat.links.push_back({occ[k - 1], occ[k]});
        }
        return flat;
    }

    // ------------------------------------------------------------------
    // SQL

    struct SelectColumn
    {
        Position at;
        std::string column;
        std::string output;
    };

    struct FromTable
    {
        std::string table;
        std::size_t alias; // R<alias>
    };

    struct WhereCondition
    {
        Position left;
        std::string left_column;
        std::optional<Position> right; // column-column condition
        std::string right_column;
        SymbolId constant = 0;         // column-constant condition
    };

    struct SqlQuery
    {
        std::vector<SelectColumn> select;
        std::vector<FromTable> from;
        std::vector<WhereCondition> where;
        bool exists = false; // boolean query: SELECT 1
    };

    /// Digits-only constants stay bare; everything else is single-quoted with quotes doubled.
    inline std::string sql_literal(const std::string &value)
    {
        bool digits = !value.empty() && std::all_of(value.begin(), value.end(), [](unsigned char c)
                                                    { return std::isdigit(c); });
        if (digits)
            return value;
        std::string out = "'";
        for (char ch : value)
        {
            if (ch == '\'')
                out += '\'';
            out += ch;
        }
        return out + "'";
    }

    /// Output column names: the query's name for the answer position holding the
    /// variable, or Z<k> when it only occurs nested in a compound answer term.
    inline std::vector<std::string> answer_column_names(const CoreAnswer &core,
                                                        const std::vector<std::string> &position_names)
    {
        std::vector<std::string> out;
        for (std::size_t k = 0; k < core.answer_vars.size(); ++k)
        {
            std::string name = "Z" + std::to_string(k + 1);
            for (std::size_t e = 0; e < core.answer_terms.size(); ++e)
            {
                const Term &t = core.answer_terms[e];
                if (t.is_var() && t.var_id() == core.answer_vars[k] && e < position_names.size())
                {
                    name = position_names[e];
                    break;
                }
            }
            out.push_back(name);
        }
        return out;
    }

    /**
     * Builds the query structure. Column-column conditions put the endpoint with
     * the smaller column index (then smaller alias) on the left.
     */
    inline SqlQuery build_sql(const FlattenedAnswer &flat, const Schema &schema,
                              const std::vector<std::string> &output_names)
    {
        SqlQuery q;
        auto table_of = [&](std::size_t literal) -> const Table &
        {
            const Table *t = schema.table_for(flat.tables.at(literal - 1).pred);
            if (!t)
                throw Error("build_sql: predicate is not mapped to a table");
            return *t;
        };
        auto column_of = [&](const Position &p) -> const std::string &
        {
            return table_of(p.literal).columns.at(p.column - 1);
        };

        q.exists = flat.answer_vars.empty();
        for (std::size_t k = 0; k < flat.answer_columns.size(); ++k)
        {
            const Position &p = flat.answer_columns[k];
            q.select.push_back({p, column_of(p), k < output_names.size() ? output_names[k] : "Z" + std::to_string(k + 1)});
        }
        for (std::size_t i = 1; i <= flat.tables.size(); ++i)
            q.from.push_back({table_of(i).name, i});
        for (const ConstantCondition &c : flat.constants)
            q.where.push_back({c.at, column_of(c.at), std::nullopt, {}, c.constant});
        for (const LinkCondition &l : flat.links)
        {
            Position a = l.first, b = l.second;
            if (std::make_pair(b.column, b.literal) < std::make_pair(a.column, a.literal))
                std::swap(a, b);
            q.where.push_back({a, column_of(a), b, column_of(b), 0});
        }
        return q;
    }

    /// Renders without the terminating semicolon.
    inline std::string render_sql(const SqlQuery &q, const SymbolTable &symbols)
    {
        auto ref = [](const Position &p, const std::string &col)
        { return "R" + std::to_string(p.literal) + "." + col; };
        std::string out = "SELECT ";
        if (q.exists)
            out += "1";
        for (std::size_t k = 0; k < q.select.size(); ++k)
        {
            if (k)
                out += ", ";
            out += ref(q.select[k].at, q.select[k].column) + " AS " + q.select[k].output;
        }
        out += " FROM ";
        for (std::size_t i = 0; i < q.from.size(); ++i)
        {
            if (i)
                out += ", ";
            out += q.from[i].table + " AS R" + std::to_string(q.from[i].alias);
        }
        if (!q.where.empty())
        {
            out += " WHERE ";
            for (std::size_t i = 0; i < q.where.size(); ++i)
            {
                const WhereCondition &w = q.where[i];
                if (i)
                    out += " AND ";
                out += ref(w.left, w.left_column) + " = ";
                if (w.right)
                    out += ref(*w.right, w.right_column);
                else
                    out += sql_literal(symbols.func(w.constant).name);
            }
        }
        return out;
    }

    inline std::string to_sql(const FlattenedAnswer &flat, const Schema &schema, const SymbolTable &symbols,
                              const std::vector<std::string> &output_names)
    {
        return render_sql(build_sql(flat, schema, output_names), symbols);
    }

    // ------------------------------------------------------------------
    // Evaluation against the fact store

    namespace detail
    {

        /// Nested-loop evaluation of SELECT/FROM/WHERE over 1-based positions.
        struct JoinQuery
        {
            std::vector<SymbolId> tables;
            std::vector<std::pair<Position, SymbolId>> constants;
            std::vector<std::pair<Position, Position>> links;
            std::vector<Position> output;
        };

        inline std::vector<Tuple> evaluate_join(const FactStore &store, const JoinQuery &q)
        {
            std::vector<const Tuple *> rows(q.tables.size(), nullptr);
            std::vector<Tuple> result;
            std::set<Tuple> seen;
            auto value = [&](const Position &p)
            { return (*rows[p.literal - 1])[p.column - 1]; };

            std::function<void(std::size_t)> loop = [&](std::size_t i)
            {
                if (i == q.tables.size())
                {
                    Tuple out;
                    for (const Position &p : q.output)
                        out.push_back(value(p));
                    if (seen.insert(out).second)
                        result.push_back(std::move(out));
                    return;
                }
                const FactStore::Relation *rel = store.relation(q.tables[i]);
                if (!rel)
                    return;
                for (const Tuple &row : rel->rows)
                {
                    rows[i] = &row;
                    bool ok = true;
                    // Conditions whose last alias is i+1 can be checked now.
                    for (const auto &[p, c] : q.constants)
                        if (p.literal == i + 1 && (p.column > row.size() || row[p.column - 1] != c))
                            ok = false;
                    for (const auto &[a, b] : q.links)
                        if (ok && std::max(a.literal, b.literal) == i + 1 && value(a) != value(b))
                            ok = false;
                    if (ok)
                        loop(i + 1);
                }
                rows[i] = nullptr;
            };
            loop(0);
            return result;
        }

    } // namespace detail

    /// Distinct answer rows of a flattened answer, in store order.
    inline std::vector<Tuple> evaluate_flattened(const FactStore &store, const FlattenedAnswer &flat)
    {
        detail::JoinQuery q;
        for (const Literal &l : flat.tables)
            q.tables.push_back(l.pred);
        for (const ConstantCondition &c : flat.constants)
            q.constants.emplace_back(c.at, c.constant);
        for (const LinkCondition &l : flat.links)
            q.links.emplace_back(l.first, l.second);
        q.output = flat.answer_columns;
        return detail::evaluate_join(store, q);
    }

    /// Distinct result rows of an SQL query structure, resolving names through the schema.
    inline std::vector<Tuple> evaluate_sql(const FactStore &store, const Schema &schema, const SqlQuery &sql)
    {
        detail::JoinQuery q;
        for (const FromTable &t : sql.from)
        {
            const Table *table = schema.find_table(t.table);
            if (!table)
                throw Error("evaluate_sql: unknown table " + t.table);
            q.tables.push_back(table->predicate);
        }
        auto resolve = [&](const Position &p, const std::string &column)
        {
            const Table *table = schema.find_table(sql.from.at(p.literal - 1).table);
            auto it = std::find(table->columns.begin(), table->columns.end(), column);
            if (it == table->columns.end())
                throw Error("evaluate_sql: unknown column " + column);
            return Position{p.literal, static_cast<std::size_t>(it - table->columns.begin()) + 1};
        };
        for (const WhereCondition &w : sql.where)
        {
            if (w.right)
                q.links.emplace_back(resolve(w.left, w.left_column), resolve(*w.right, w.right_column));
            else
                q.constants.emplace_back(resolve(w.left, w.left_column), w.constant);
        }
        for (const SelectColumn &c : sql.select)
            q.output.push_back(resolve(c.at, c.column));
        return detail::evaluate_join(store, q);
    }

    // ------------------------------------------------------------------
    // Concrete answers

    /// One value per distinguished variable. Variables inside the values are
    /// universally quantified (any term may be substituted).
    struct ConcreteAnswer
    {
        std::vector<Term> values;

        friend bool operator==(const ConcreteAnswer &a, const ConcreteAnswer &b) { return a.values == b.values; }
        friend bool operator<(const ConcreteAnswer &a, const ConcreteAnswer &b)
        {
            return std::lexicographical_compare(a.values.begin(), a.values.end(), b.values.begin(), b.values.end());
        }

        bool is_ground() const
        {
            return std::all_of(values.begin(), values.end(), [](const Term &t)
                               { return t.is_ground(); });
        }
    };

    /// Renumbers universal variables by first occurrence so equal answers compare equal.
    inline ConcreteAnswer canonical_answer(std::vector<Term> values)
    {
        std::vector<VarId> vars;
        for (const Term &t : values)
            collect_vars(t, vars);
        Substitution renaming;
        for (std::size_t i = 0; i < vars.size(); ++i)
            renaming.bind(vars[i], Term::var(static_cast<VarId>(i)));
        for (Term &t : values)
            t = renaming.apply(t);
        return {std::move(values)};
    }

    /// Constants print with their plain spelling; variables print as `*`.
    inline std::string value_string(const Term &t, const SymbolTable &symbols)
    {
        if (t.is_constant())
            return symbols.func(t.functor()).name;
        return to_string(t, symbols, [](VarId)
                         { return std::string("*"); });
    }

    /// `X=v, Y=w`; universally quantified positions print as `*`.
    inline std::string format_answer(const ConcreteAnswer &a, const std::vector<std::string> &names,
                                     const SymbolTable &symbols)
    {
        std::string out;
        for (std::size_t i = 0; i < a.values.size(); ++i)
        {
            if (i)
                out += ", ";
            out += (i < names.size() ? names[i] : "_" + std::to_string(i)) + "=" +
                   value_string(a.values[i], symbols);
        }
        if (!a.is_ground())
            out += "  (forall *)";
        return out;
    }

    /// Everything derived from one schematic answer before touching the store.
    struct CompiledAnswer
    {
        AnswerCase kind = AnswerCase::Standard;
        std::optional<Clause> merged;          // pure/standard with unifiable answer literals
        std::optional<CoreAnswer> core;        // standard
        std::optional<FlattenedAnswer> flat;   // standard with flat constraint
        std::string diagnostic;
    };

    inline CompiledAnswer compile_answer(const Clause &answer)
    {
        CompiledAnswer out;
        out.kind = classify_case(answer);
        if (out.kind == AnswerCase::KbRefutation)
        {
            out.diagnostic = "knowledge base is inconsistent";
            return out;
        }
        if (out.kind == AnswerCase::KbDbInconsistency)
            return out;
        out.merged = merge_answer_literals(answer);
        if (!out.merged)
        {
            out.diagnostic = "answer literals are not simultaneously unifiable; no instances";
            return out;
        }
        if (out.kind == AnswerCase::PureAnswer)
            return out;
        out.core = normalize_answer(*out.merged);
        out.flat = flatten(*out.core);
        if (!out.flat)
            out.diagnostic = "constraint contains compound terms; schematic answer has no instances";
        return out;
    }

    struct InstantiationResult
    {
        AnswerCase kind = AnswerCase::Standard;
        std::vector<ConcreteAnswer> answers; // distinct, in store order
        bool db_inconsistent = false;        // kb-db-inconsistency with a satisfiable constraint
        std::string diagnostic;
    };

    inline InstantiationResult instantiate(const FactStore &store, const CompiledAnswer &compiled,
                                           const Clause &answer)
    {
        InstantiationResult out;
        out.kind = compiled.kind;
        out.diagnostic = compiled.diagnostic;
        switch (compiled.kind)
        {
        case AnswerCase::KbRefutation:
            return out;
        case AnswerCase::KbDbInconsistency:
        {
            std::vector<Literal> db = database_literals(answer);
            out.db_inconsistent = is_flat(db) && constraint_satisfiable(store, db);
            if (out.db_inconsistent)
                out.diagnostic = "database is inconsistent with the knowledge base";
            return out;
        }
        case AnswerCase::PureAnswer:
        {
            if (compiled.merged)
                out.answers.push_back(canonical_answer(answer_atoms(*compiled.merged).at(0).args));
            return out;
        }
        case AnswerCase::Standard:
            break;
        }
        if (!compiled.flat)
            return out;
        std::set<ConcreteAnswer> seen;
        for (const Tuple &row : evaluate_flattened(store, *compiled.flat))
        {
            Substitution s;
            for (std::size_t k = 0; k < row.size(); ++k)
                s.bind(compiled.core->answer_vars[k], Term::app(row[k]));
            std::vector<Term> values;
            for (const Term &t : compiled.core->answer_terms)
                values.push_back(s.apply(t));
            ConcreteAnswer a = canonical_answer(std::move(values));
            if (seen.insert(a).second)
                out.answers.push_back(std::move(a));
        }
        return out;
    }

    inline InstantiationResult instantiate(const FactStore &store, const Clause &answer)
    {
        return instantiate(store, compile_answer(answer), answer);
    }

    inline InstantiationResult instantiate(const FactStore &store, const SchematicAnswer &sa)
    {
        return instantiate(store, sa.clause);
    }

} // namespace sa
