#include <sa/driver.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <map>

int main(int argc, char **argv)
{
    CLI::App app{"Answer deductive queries over a relational database by saturation"};
    sa::RunConfig config;
    std::string calculus = "unordered";
    std::string emit = "both";
    bool no_prune_db = false, no_prune_answers = false, no_subsumption = false;

    app.add_option("--kb", config.kb_path, "Clausal knowledge base");
    app.add_option("--schema", config.schema_path, "Table declarations");
    app.add_option("--data", config.data_path, "Table rows");
    app.add_option("--query", config.query_path, "Query file")->required();
    app.add_option("--docs", config.docs_path, "Document registry");
    app.add_option("--calculus", calculus, "unordered | ordered | ordered-selection")
        ->check(CLI::IsMember({"unordered", "ordered", "ordered-selection"}));
    app.add_flag("--no-prune-db", no_prune_db, "Keep clauses whose database literals have no solution");
    app.add_flag("--no-prune-answers", no_prune_answers, "Keep clauses with non-unifiable answer literals");
    app.add_flag("--no-subsumption", no_subsumption, "Disable forward and backward subsumption");
    app.add_option("--max-derived", config.max_derived, "Stop after this many derived clauses");
    app.add_option("--timeout", config.timeout_seconds, "Saturation time limit in seconds");
    app.add_option("--max-answers", config.max_answers, "Stop after this many schematic answers (0 = no limit)");
    app.add_option("--emit", emit, "sql | answers | both | docs")
        ->check(CLI::IsMember({"sql", "answers", "both", "docs"}));
    app.add_flag("--oracle-check", config.oracle_check, "Compare the answers with a ground reasoner");
    app.add_option("--oracle-depth", config.oracle_depth, "Term depth bound for the ground reasoner");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        int code = app.exit(e);
        return code == 0 ? 0 : sa::exit_code::config_error;
    }

    static const std::map<std::string, sa::Calculus> calculi{
        {"unordered", sa::Calculus::Unordered},
        {"ordered", sa::Calculus::Ordered},
        {"ordered-selection", sa::Calculus::OrderedSelection}};
    static const std::map<std::string, sa::EmitMode> modes{
        {"sql", sa::EmitMode::Sql}, {"answers", sa::EmitMode::Answers},
        {"both", sa::EmitMode::Both}, {"docs", sa::EmitMode::Docs}};
    config.calculus = calculi.at(calculus);
    config.emit = modes.at(emit);
    config.prune_db = !no_prune_db;
    config.prune_answers = !no_prune_answers;
    config.subsumption = !no_subsumption;
    config.log = sa::log_level_from_env();

    return sa::run(config, std::cout, std::cerr).exit_code;
}
