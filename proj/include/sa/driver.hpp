#pragma once

// End-to-end query run: parse inputs, saturate on a worker thread, and compile
// and print schematic answers on the calling thread as they arrive.

#include "answer_compiler.hpp"
#include "channel.hpp"
#include "doc_index.hpp"
#include "oracle.hpp"
#include "parser.hpp"
#include "saturation.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace sa
{

    enum class EmitMode
    {
        Sql,
        Answers,
        Both,
        Docs
    };

    enum class LogLevel
    {
        Quiet,
        Info,
        Trace
    };

    struct RunConfig
    {
        std::string kb_path;
        std::string schema_path;
        std::string data_path;
        std::string query_path;
        std::string docs_path;

        Calculus calculus = Calculus::Unordered;
        bool prune_db = true;
        bool prune_answers = true;
        bool prune_prefixes = true;
        bool subsumption = true;

        std::size_t max_derived = 100000;
        double timeout_seconds = 60;
        std::size_t max_answers = 0;

        EmitMode emit = EmitMode::Both;
        bool oracle_check = false;
        std::size_t oracle_depth = 3;

        LogLevel log = LogLevel::Quiet;
    };

    namespace exit_code
    {
        inline constexpr int ok = 0;
        inline constexpr int config_error = 1;
        inline constexpr int kb_refutation = 2;
        inline constexpr int oracle_mismatch = 3;
        inline constexpr int budget_exhausted = 4;
    } // namespace exit_code

    /// Outcome of a run, with the wall-clock instants used to observe streaming.
    struct RunReport
    {
        int exit_code = exit_code::ok;
        SaturationStatus status = SaturationStatus::Saturated;
        SaturationCounters counters;
        std::size_t schematic_answers = 0;
        std::size_t concrete_answers = 0;
        bool kb_refutation = false;
        bool db_inconsistent = false;
        std::optional<bool> oracle_match;
        std::set<std::vector<Term>> answers; // ground answers collected
        std::set<std::string> documents;
        std::vector<std::chrono::steady_clock::time_point> answer_printed;
        std::chrono::steady_clock::time_point saturation_finished;
    };

    inline std::optional<LogLevel> parse_log_level(const std::string &s)
    {
        if (s == "quiet")
            return LogLevel::Quiet;
        if (s == "info")
            return LogLevel::Info;
        if (s == "trace")
            return LogLevel::Trace;
        return std::nullopt;
    }

    /// Level from the SA_LOG environment variable; unset or unknown means quiet.
    inline LogLevel log_level_from_env()
    {
        const char *v = std::getenv("SA_LOG");
        if (!v)
            return LogLevel::Quiet;
        return parse_log_level(v).value_or(LogLevel::Quiet);
    }

    inline std::string read_file(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw Error(path + ": cannot open file");
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    namespace detail
    {

        struct LoadedInputs
        {
            std::vector<Clause> kb;
            std::optional<Schema> schema;
            FactStore store;
            DeductiveQuery query;
            DocumentIndex index;
            bool have_docs = false;
        };

        /// Reads `path` and hands its text to `parse`, prefixing errors with the path.
        template <class F>
        auto parse_file(const std::string &path, F &&parse) -> decltype(parse(std::string_view{}))
        {
            std::string text = read_file(path);
            try
            {
                return parse(std::string_view(text));
            }
            catch (const ParseError &e)
            {
                throw Error(path + ":" + e.what());
            }
            catch (const Error &e)
            {
                throw Error(path + ": " + e.what());
            }
        }

        /// Expands universally quantified positions over `domain`.
        inline void expand_answer(const ConcreteAnswer &a, const std::vector<SymbolId> &domain,
                                  std::set<std::vector<Term>> &out)
        {
            std::vector<VarId> vars;
            for (const Term &t : a.values)
                collect_vars(t, vars);
            std::vector<std::size_t> pick(vars.size(), 0);
            if (!vars.empty() && domain.empty())
                return;
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

        inline std::string tuple_string(const std::vector<Term> &t, const DeductiveQuery &q,
                                        const SymbolTable &symbols)
        {
            std::string out;
            for (std::size_t i = 0; i < t.size(); ++i)
            {
                if (i)
                    out += ", ";
                out += q.var_name(q.distinguished[i]) + "=" + value_string(t[i], symbols);
            }
            return out.empty() ? "()" : out;
        }

    } // namespace detail

    /**
     * Runs one query. Output goes to `out`, diagnostics and logging to `err`.
     * Returns the report; its exit_code follows the command-line convention.
     */
    inline RunReport run(const RunConfig &config, std::ostream &out, std::ostream &err)
    {
        RunReport report;
        SymbolTable symbols;
        detail::LoadedInputs in;

        try
        {
            if (config.query_path.empty())
                throw Error("a query file is required");
            if (config.emit == EmitMode::Docs && config.docs_path.empty())
                throw Error("--emit docs requires a document registry (--docs)");
            if (!config.data_path.empty() && config.schema_path.empty())
                throw Error("--data requires --schema");

            // Declaration order fixes symbol precedence: schema, KB, query, documents.
            if (!config.schema_path.empty())
                in.schema = detail::parse_file(config.schema_path, [&](std::string_view t)
                                               { return parse_schema(t, symbols); });
            if (!config.kb_path.empty())
                in.kb = detail::parse_file(config.kb_path, [&](std::string_view t)
                                           { return parse_kb(t, symbols); });
            in.query = detail::parse_file(config.query_path, [&](std::string_view t)
                                          { return parse_query(t, symbols); });
            if (!config.docs_path.empty())
            {
                auto docs = detail::parse_file(config.docs_path, [&](std::string_view t)
                                               { return parse_documents(t, symbols); });
                for (const DocumentSpec &d : docs)
                    in.index.register_document(d);
                in.have_docs = true;
            }
            if (!config.data_path.empty())
                in.store = detail::parse_file(config.data_path, [&](std::string_view t)
                                              { return load_facts(*in.schema, t, symbols); });
        }
        catch (const Error &e)
        {
            err << "error: " << e.what() << "\n";
            report.exit_code = exit_code::config_error;
            return report;
        }

        SaturationConfig sc;
        sc.calculus = config.calculus;
        sc.prune.db_literals = config.prune_db;
        sc.prune.answer_literals = config.prune_answers;
        sc.prune.prefixes = config.prune_prefixes;
        sc.subsumption = config.subsumption;
        sc.max_derived = config.max_derived;
        sc.timeout_seconds = config.timeout_seconds;
        sc.max_answers = config.max_answers;
        std::ostringstream trace;
        if (config.log == LogLevel::Trace)
            sc.trace = &trace;

        const bool use_store = !config.data_path.empty();
        Saturator saturator(sc, use_store ? &in.store : nullptr, &symbols);
        if (in.schema)
            for (Clause &c : build_abstraction(*in.schema))
                saturator.add_input(std::move(c));
        if (in.have_docs)
            in.index.load_into(saturator);
        for (const Clause &c : in.kb)
            saturator.add_input(c);
        saturator.add_input(in.query.goal);

        if (config.log != LogLevel::Quiet)
            err << "[sa] " << saturator.clause_count() << " input clauses, " << in.store.size() << " facts\n";

        std::vector<std::string> position_names;
        for (VarId v : in.query.distinguished)
            position_names.push_back(in.query.var_name(v));
        std::vector<SymbolId> domain;
        {
            std::set<SymbolId> d = candidate_constants(in.store, in.kb, in.query);
            domain.assign(d.begin(), d.end());
        }
        const bool print_sql = (config.emit == EmitMode::Sql || config.emit == EmitMode::Both) && in.schema;
        const bool print_answers = config.emit == EmitMode::Answers || config.emit == EmitMode::Both;

        Channel<SchematicAnswer> channel;
        SaturationResult result;
        std::thread producer([&]
                             {
            result = saturator.run([&](const SchematicAnswer &a) {
                channel.push(a);
                return true;
            });
            report.saturation_finished = std::chrono::steady_clock::now();
            channel.close(); });

        std::set<ConcreteAnswer> printed;
        try
        {
            while (std::optional<SchematicAnswer> a = channel.pop())
            {
                ++report.schematic_answers;
                std::ostringstream block;
                block << "-- answer " << report.schematic_answers << "\n";
                block << "-- schematic: "
                      << to_string(a->clause, symbols, [&](VarId v)
                                   { return "V" + std::to_string(v); })
                      << "\n";
                CompiledAnswer compiled = compile_answer(a->clause);
                InstantiationResult inst = instantiate(in.store, compiled, a->clause);

                switch (compiled.kind)
                {
                case AnswerCase::KbRefutation:
                    report.kb_refutation = true;
                    block << "-- KB refutation: the knowledge base is inconsistent\n";
                    saturator.request_stop();
                    break;
                case AnswerCase::KbDbInconsistency:
                    if (inst.db_inconsistent && !report.db_inconsistent)
                    {
                        report.db_inconsistent = true;
                        block << "-- DB/KB inconsistency: the database is inconsistent with the knowledge base;"
                                 " every tuple is an answer\n";
                    }
                    else if (!inst.db_inconsistent)
                        block << "-- constraint unsatisfiable in the database; no answers\n";
                    break;
                case AnswerCase::PureAnswer:
                case AnswerCase::Standard:
                    if (!compiled.diagnostic.empty())
                        block << "-- " << compiled.diagnostic << "\n";
                    if (print_sql && compiled.flat)
                        block << to_sql(*compiled.flat, *in.schema, symbols,
                                        answer_column_names(*compiled.core, position_names))
                              << ";\n";
                    for (const ConcreteAnswer &c : inst.answers)
                    {
                        detail::expand_answer(c, domain, report.answers);
                        if (printed.insert(c).second && print_answers)
                            block << format_answer(c, position_names, symbols) << "\n";
                    }
                    break;
                }
                if (config.emit == EmitMode::Docs)
                {
                    std::set<std::string> docs = in.index.relevant_documents(*a);
                    report.documents.insert(docs.begin(), docs.end());
                    block << "-- documents:";
                    for (const std::string &d : docs)
                        block << " " << d;
                    block << "\n";
                }
                out << block.str() << std::flush;
                report.answer_printed.push_back(std::chrono::steady_clock::now());
            }
        }
        catch (...)
        {
            saturator.request_stop();
            while (channel.pop())
            {
            }
            producer.join();
            throw;
        }
        producer.join();

        report.status = result.status;
        report.counters = result.counters;
        report.concrete_answers = printed.size();
        if (config.log == LogLevel::Trace)
            err << trace.str();
        if (config.log != LogLevel::Quiet)
            err << "[sa] activated " << result.counters.activated << ", subsumed "
                << result.counters.forward_subsumed + result.counters.backward_subsumed << ", duplicates "
                << result.counters.duplicates << "\n";

        const char *status_text = report.kb_refutation ? "kb-refutation" : to_string(result.status);
        out << "-- status: " << status_text << "; schematic answers: " << report.schematic_answers
            << "; concrete answers: " << report.concrete_answers << "; derived: " << result.counters.derived
            << "; kept: " << result.counters.kept << "; pruned db/answer/prefix: " << result.counters.pruned_db
            << "/" << result.counters.pruned_answer << "/" << result.counters.pruned_prefix << "\n";

        if (config.emit == EmitMode::Docs)
        {
            out << "-- relevant documents:";
            for (const std::string &d : report.documents)
                out << " " << d;
            out << "\n";
        }

        if (report.db_inconsistent)
        {
            // Every candidate tuple is an answer.
            ConcreteAnswer all;
            for (std::size_t i = 0; i < in.query.distinguished.size(); ++i)
                all.values.push_back(Term::var(static_cast<VarId>(i)));
            detail::expand_answer(all, domain, report.answers);
        }

        if (config.oracle_check && !report.kb_refutation)
        {
            if (result.status != SaturationStatus::Saturated)
                out << "ORACLE: skipped (saturation did not complete)\n";
            else
            {
                try
                {
                    GroundAnswerSet expected = ground_answers(in.store, in.kb, in.query, config.oracle_depth);
                    std::set<std::vector<Term>> computed;
                    for (const auto &t : report.answers)
                        if (std::all_of(t.begin(), t.end(), [](const Term &x)
                                        { return x.is_constant(); }))
                            computed.insert(t);
                    report.oracle_match = computed == expected.tuples;
                    if (*report.oracle_match)
                        out << "ORACLE: match" << (expected.exact ? "" : " (depth-bounded)") << "\n";
                    else
                    {
                        out << "ORACLE: mismatch" << (expected.exact ? "" : " (depth-bounded)") << "\n";
                        for (const auto &t : expected.tuples)
                            if (!computed.count(t))
                                out << "  missing: " << detail::tuple_string(t, in.query, symbols) << "\n";
                        for (const auto &t : computed)
                            if (!expected.tuples.count(t))
                                out << "  extra: " << detail::tuple_string(t, in.query, symbols) << "\n";
                    }
                }
                catch (const Error &e)
                {
                    err << "error: oracle: " << e.what() << "\n";
                    report.exit_code = exit_code::config_error;
                    return report;
                }
            }
        }

        if (report.kb_refutation)
            report.exit_code = exit_code::kb_refutation;
        else if (report.oracle_match && !*report.oracle_match)
            report.exit_code = exit_code::oracle_mismatch;
        else if (result.status == SaturationStatus::BudgetExhausted)
            report.exit_code = exit_code::budget_exhausted;
        else
            report.exit_code = exit_code::ok;
        return report;
    }

} // namespace sa
