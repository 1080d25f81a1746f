#pragma once

// Shared helpers for the unit tests and the acceptance binary: a harness that
// runs the whole pipeline on in-memory texts, and random fixture generators.

#include <sa/sa.hpp>

#include <chrono>
#include <fstream>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace sa::testing
{

    inline std::string fixture_path(const std::string &rel) { return std::string(SA_FIXTURES) + "/" + rel; }

    inline std::string slurp(const std::string &rel) { return read_file(fixture_path(rel)); }

    struct Texts
    {
        std::string schema;
        std::string kb;
        std::string query;
        std::string data;
    };

    using GroundSet = std::set<std::vector<Term>>;

    /// Everything produced by one saturation run over parsed texts.
    struct Pipeline
    {
        SymbolTable symbols;
        Schema schema;
        std::vector<Clause> kb;
        DeductiveQuery query;
        FactStore store;
        std::unique_ptr<Saturator> saturator;
        SaturationResult result;
        std::vector<SchematicAnswer> answers;
        GroundSet ground; // instantiated answers, universal positions expanded
        bool refutation = false;
        bool db_inconsistent = false;
        double seconds = 0;

        Pipeline() = default;
        Pipeline(const Pipeline &) = delete;

        std::vector<SymbolId> domain() const
        {
            std::set<SymbolId> d = candidate_constants(store, kb, query);
            return {d.begin(), d.end()};
        }

        GroundAnswerSet oracle(std::size_t depth = 3) const { return ground_answers(store, kb, query, depth); }
    };

    inline void expand_into(const ConcreteAnswer &a, const std::vector<SymbolId> &domain, GroundSet &out)
    {
        std::vector<VarId> vars;
        for (const Term &t : a.values)
            collect_vars(t, vars);
        if (!vars.empty() && domain.empty())
            return;
        std::vector<std::size_t> pick(vars.size(), 0);
        for (;;)
        {
            Substitution s;
            for (std::size_t i = 0; i < vars.size(); ++i)
                s.bind(vars[i], Term::app(domain[pick[i]]));
            std::vector<Term> tuple;
            for (const Term &t : a.values)
                tuple.push_back(s.apply(t));
            out.insert(std::move(tuple));
            std::size_t i = 0;
            while (i < pick.size() && ++pick[i] == domain.size())
                pick[i++] = 0;
            if (i == pick.size())
                break;
        }
    }

    inline std::unique_ptr<Pipeline> run_pipeline(const Texts &t, SaturationConfig config = {})
    {
        auto p = std::make_unique<Pipeline>();
        p->schema = parse_schema(t.schema, p->symbols);
        p->kb = parse_kb(t.kb, p->symbols);
        p->query = parse_query(t.query, p->symbols);
        p->store = load_facts(p->schema, t.data, p->symbols);

        p->saturator = std::make_unique<Saturator>(config, &p->store, &p->symbols);
        for (Clause &c : build_abstraction(p->schema))
            p->saturator->add_input(std::move(c));
        for (const Clause &c : p->kb)
            p->saturator->add_input(c);
        p->saturator->add_input(p->query.goal);

        const std::vector<SymbolId> domain = p->domain();
        auto start = std::chrono::steady_clock::now();
        p->result = p->saturator->run([&](const SchematicAnswer &a)
                                      {
            p->answers.push_back(a);
            InstantiationResult r = instantiate(p->store, a);
            if (r.kind == AnswerCase::KbRefutation)
                p->refutation = true;
            if (r.db_inconsistent)
                p->db_inconsistent = true;
            for (const ConcreteAnswer &c : r.answers)
                expand_into(c, domain, p->ground);
            return true; });
        p->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (p->db_inconsistent || p->refutation)
        {
            ConcreteAnswer all;
            for (std::size_t i = 0; i < p->query.distinguished.size(); ++i)
                all.values.push_back(Term::var(static_cast<VarId>(i)));
            expand_into(all, domain, p->ground);
        }
        return p;
    }

    // ------------------------------------------------------------------
    // Random function-free Horn fixtures

    /**
     * Non-recursive, range-restricted definite Horn programs over a small random
     * database: 1-5 tables of arity 1-3 with at most 30 rows, up to 15 rules whose
     * bodies only use tables and earlier derived predicates, and a query with at
     * most 3 distinguished variables.
     */
    inline Texts random_horn_fixture(std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        auto pick = [&](int lo, int hi)
        { return std::uniform_int_distribution<int>(lo, hi)(rng); };

        struct Pred
        {
            std::string name;
            int arity;
        };
        std::vector<Pred> tables;
        std::ostringstream schema, data, kb, query;

        int n_tables = pick(1, 5);
        int n_consts = pick(3, 8);
        for (int i = 0; i < n_tables; ++i)
        {
            Pred p{"e" + std::to_string(i), pick(1, 3)};
            schema << "table t" << i << "(";
            for (int c = 0; c < p.arity; ++c)
                schema << (c ? ", " : "") << "c" << c + 1;
            schema << ") as " << p.name << "/" << p.arity << ".\n";
            int rows = pick(0, 30);
            std::set<std::vector<int>> seen;
            for (int r = 0; r < rows; ++r)
            {
                std::vector<int> row;
                for (int c = 0; c < p.arity; ++c)
                    row.push_back(pick(0, n_consts - 1));
                if (!seen.insert(row).second)
                    continue;
                data << "t" << i << ":";
                for (int c = 0; c < p.arity; ++c)
                    data << (c ? ", " : " ") << "k" << row[c];
                data << "\n";
            }
            tables.push_back(p);
        }

        std::vector<Pred> derived;
        int n_derived = pick(1, 5);
        for (int i = 0; i < n_derived; ++i)
            derived.push_back({"p" + std::to_string(i), pick(1, 2)});

        auto atom = [&](const Pred &p, const std::vector<std::string> &vars, double const_prob)
        {
            std::string s = p.name + "(";
            for (int a = 0; a < p.arity; ++a)
            {
                if (a)
                    s += ",";
                if (std::uniform_real_distribution<double>(0, 1)(rng) < const_prob)
                    s += "k" + std::to_string(pick(0, n_consts - 1));
                else
                    s += vars[pick(0, static_cast<int>(vars.size()) - 1)];
            }
            return s + ")";
        };

        int n_rules = pick(n_derived, std::min(15, n_derived + 8));
        for (int r = 0; r < n_rules; ++r)
        {
            int head = r < n_derived ? r : pick(0, n_derived - 1);
            std::vector<Pred> usable = tables;
            for (int j = 0; j < head; ++j)
                usable.push_back(derived[j]);
            std::vector<std::string> vars{"X", "Y", "Z"};
            int body_len = pick(1, 3);
            std::vector<std::string> body;
            std::set<std::string> body_vars;
            for (int b = 0; b < body_len; ++b)
            {
                std::string a = atom(usable[pick(0, static_cast<int>(usable.size()) - 1)], vars, 0.1);
                for (const std::string &v : vars)
                    if (a.find("(" + v + ",") != std::string::npos || a.find("," + v + ",") != std::string::npos ||
                        a.find("," + v + ")") != std::string::npos || a.find("(" + v + ")") != std::string::npos)
                        body_vars.insert(v);
                body.push_back(a);
            }
            std::string h = derived[head].name + "(";
            std::vector<std::string> bv(body_vars.begin(), body_vars.end());
            for (int a = 0; a < derived[head].arity; ++a)
            {
                if (a)
                    h += ",";
                h += bv.empty() ? "k" + std::to_string(pick(0, n_consts - 1))
                                : bv[pick(0, static_cast<int>(bv.size()) - 1)];
            }
            h += ")";
            kb << h << " :- ";
            for (std::size_t b = 0; b < body.size(); ++b)
                kb << (b ? ", " : "") << body[b];
            kb << ".\n";
        }

        std::vector<Pred> all = tables;
        all.insert(all.end(), derived.begin(), derived.end());
        std::vector<std::string> qvars{"A", "B", "C"};
        int q_len = pick(1, 2);
        query << "?- ";
        std::set<std::string> used;
        for (int i = 0; i < q_len; ++i)
        {
            // Bias towards derived predicates so rules are exercised.
            const Pred &p = pick(0, 2) ? derived[pick(0, n_derived - 1)] : all[pick(0, static_cast<int>(all.size()) - 1)];
            std::string a = atom(p, qvars, 0.1);
            for (const std::string &v : qvars)
                if (a.find(v) != std::string::npos)
                    used.insert(v);
            query << (i ? ", " : "") << a;
        }
        if (!used.empty() && pick(0, 3) == 0)
        {
            // Keep a random non-empty subset as distinguished variables.
            std::vector<std::string> keep;
            for (const std::string &v : used)
                if (pick(0, 1))
                    keep.push_back(v);
            if (keep.empty())
                keep.push_back(*used.begin());
            query << " answer ";
            for (std::size_t i = 0; i < keep.size(); ++i)
                query << (i ? ", " : "") << keep[i];
        }
        query << ".\n";
        return {schema.str(), kb.str(), query.str(), data.str()};
    }

    // ------------------------------------------------------------------
    // Random schematic answers over a random store

    struct RandomStore
    {
        SymbolTable symbols;
        Schema schema;
        FactStore store;
        std::vector<SymbolId> constants;
        std::vector<SymbolId> tables; // predicates
        SymbolId answer = 0;
    };

    /// 1-3 tables of arity 1-3 over `n_consts` constants with at most 30 rows each.
    /// The answer predicate is left for the caller to declare.
    inline std::unique_ptr<RandomStore> random_store(std::mt19937_64 &rng, int n_consts)
    {
        auto pick = [&](int lo, int hi)
        { return std::uniform_int_distribution<int>(lo, hi)(rng); };
        auto s = std::make_unique<RandomStore>();
        int n_tables = pick(1, 3);
        for (int i = 0; i < n_tables; ++i)
        {
            int arity = pick(1, 3);
            Table t;
            t.name = "t" + std::to_string(i);
            for (int c = 0; c < arity; ++c)
                t.columns.push_back("c" + std::to_string(c + 1));
            t.predicate = s->symbols.predicate("r" + std::to_string(i), arity, PredicateKind::Database);
            s->tables.push_back(t.predicate);
            s->schema.add_table(t);
        }
        for (int c = 0; c < n_consts; ++c)
            s->constants.push_back(s->symbols.constant(c % 3 == 0 ? std::to_string(c) : "k" + std::to_string(c)));
        for (SymbolId p : s->tables)
        {
            std::size_t arity = s->symbols.pred(p).arity;
            int rows = pick(0, 30);
            for (int r = 0; r < rows; ++r)
            {
                Tuple row;
                for (std::size_t c = 0; c < arity; ++c)
                    row.push_back(s->constants[pick(0, n_consts - 1)]);
                s->store.insert(p, std::move(row));
            }
        }
        return s;
    }

    /// Random flat term: a variable among the first `n_vars` or a constant.
    inline Term random_flat_term(std::mt19937_64 &rng, const RandomStore &s, int n_vars, double const_prob)
    {
        if (std::uniform_real_distribution<double>(0, 1)(rng) < const_prob)
            return Term::app(s.constants[std::uniform_int_distribution<std::size_t>(0, s.constants.size() - 1)(rng)]);
        return Term::var(static_cast<VarId>(std::uniform_int_distribution<int>(0, n_vars - 1)(rng)));
    }

    inline std::vector<Literal> random_constraint(std::mt19937_64 &rng, const RandomStore &s, int n_lits, int n_vars,
                                                  double const_prob)
    {
        std::vector<Literal> d;
        for (int i = 0; i < n_lits; ++i)
        {
            SymbolId p = s.tables[std::uniform_int_distribution<std::size_t>(0, s.tables.size() - 1)(rng)];
            std::vector<Term> args;
            for (std::size_t a = 0; a < s.symbols.pred(p).arity; ++a)
                args.push_back(random_flat_term(rng, s, n_vars, const_prob));
            d.push_back(Literal::pos(p, std::move(args)));
        }
        return d;
    }

    /// All assignments of `vars` to `domain`; `f` returns false to stop.
    template <class F>
    void for_each_grounding(const std::vector<VarId> &vars, const std::vector<SymbolId> &domain, F &&f)
    {
        if (!vars.empty() && domain.empty())
            return;
        std::vector<std::size_t> pick(vars.size(), 0);
        for (;;)
        {
            Substitution s;
            for (std::size_t i = 0; i < vars.size(); ++i)
                s.bind(vars[i], Term::app(domain[pick[i]]));
            if (!f(s))
                return;
            std::size_t i = 0;
            while (i < pick.size() && ++pick[i] == domain.size())
                pick[i++] = 0;
            if (i == pick.size())
                return;
        }
    }

    inline bool holds(const FactStore &store, const Literal &ground)
    {
        Tuple t;
        for (const Term &a : ground.args)
        {
            if (!a.is_constant())
                return false;
            t.push_back(a.functor());
        }
        return store.contains(ground.pred, t);
    }

} // namespace sa::testing
