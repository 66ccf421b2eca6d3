// Configuration parsing, the JSON report builders, byte-identical report
// determinism, and the command-line front end driven through in-memory
// streams with every exit code exercised.
#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "wb/attacks.hpp"
#include "wb/cli.hpp"
#include "wb/report.hpp"

using namespace wb;

namespace {

struct CliRun {
    int exit_code = -1;
    std::string out;
    std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    CliRun r;
    r.exit_code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

template <typename Fn>
std::string thrown_code(Fn fn) {
    try {
        fn();
    } catch (const WbError& e) {
        return e.code();
    }
    return "";
}

std::string write_temp(const std::string& name, const std::string& body) {
    std::string path = "/tmp/" + name;
    std::ofstream f(path);
    REQUIRE(f);
    f << body;
    return path;
}

}  // namespace

TEST_CASE("configuration parsing fills defaults and accepts a full document") {
    WorkbenchConfig d = parse_config_text("{}", "inline");
    CHECK(d.seed == 1);
    CHECK(d.trials == 100);
    CHECK(d.data_dir.empty());
    CHECK(d.cost_z == 5);
    CHECK(d.suite.digest_len == 32);
    CHECK(d.resolved_data_dir() == default_data_dir());

    WorkbenchConfig c = parse_config_text(R"({
        "seed": 7,
        "trials": 3,
        "data_dir": "/tmp/fixtures",
        "cost_z": 2,
        "suite": {
            "digest_len": 16,
            "key_len": 24,
            "fuzzy_t": 5,
            "puf_noise_rate": 0.01,
            "entropy_flag_threshold": 7.5,
            "freshness_window": 9
        }
    })",
                                          "inline");
    CHECK(c.seed == 7);
    CHECK(c.trials == 3);
    CHECK(c.data_dir == "/tmp/fixtures");
    CHECK(c.resolved_data_dir() == "/tmp/fixtures");
    CHECK(c.cost_z == 2);
    CHECK(c.suite.digest_len == 16);
    CHECK(c.suite.key_len == 24);
    CHECK(c.suite.fuzzy_t == 5);
    CHECK(c.suite.puf_noise_rate == Catch::Approx(0.01));
    CHECK(c.suite.entropy_flag_threshold == Catch::Approx(7.5));
    CHECK(c.suite.freshness_window == 9);
}

TEST_CASE("configuration parsing rejects unknown keys, bad types, and bad ranges") {
    auto parse = [](const std::string& text) {
        return thrown_code([&] { parse_config_text(text, "inline"); });
    };
    CHECK(parse(R"({"sede": 1})") == "config-unknown-key");
    CHECK(parse(R"({"suite": {"digest": 32}})") == "config-unknown-key");
    CHECK(parse(R"({"seed": "one"})") == "config-parse-error");
    CHECK(parse(R"({"suite": []})") == "config-parse-error");
    CHECK(parse(R"([1, 2])") == "config-parse-error");
    CHECK(parse("{not json") == "config-parse-error");
    CHECK(parse(R"({"trials": 0})") == "config-parse-error");
    CHECK(parse(R"({"cost_z": 0})") == "config-parse-error");
    CHECK(parse(R"({"suite": {"digest_len": 4}})") == "config-parse-error");
    CHECK(parse(R"({"suite": {"key_len": 8}})") == "config-parse-error");
    CHECK(parse(R"({"suite": {"puf_noise_rate": 0.9}})") == "config-parse-error");
    CHECK(parse(R"({"suite": {"freshness_window": -1}})") == "config-parse-error");

    CHECK(thrown_code([] { load_config("/tmp/no-such-config.json"); }) == "config-file-missing");

    std::string path = write_temp("wb_cfg_roundtrip.json", R"({"seed": 42, "trials": 5})");
    WorkbenchConfig loaded = load_config(path);
    CHECK(loaded.seed == 42);
    CHECK(loaded.trials == 5);
    std::remove(path.c_str());
}

TEST_CASE("report builders carry the expected fields") {
    SuiteParams suite;
    Json s = suite_report(suite);
    CHECK(s["digest_len"] == 32);
    CHECK(s["modulus"] == suite.modulus);
    CHECK(s["fuzzy_t"] == 3);

    ProtocolModel model = load_protocol_fixture(default_data_dir(), "p2");
    DeploymentState state = register_deployment(model, suite, 11);
    SessionResult session = run_session(state, 12);
    Json sess = session_summary("p2", session);
    CHECK(sess["protocol"] == "p2");
    CHECK(sess["seed"] == 12);
    CHECK(sess["messages"] == session.wire.size());
    CHECK(sess["all_accept"] == true);
    CHECK(sess["keys_agree"] == true);
    CHECK(sess["session_key"].is_string());
    CHECK(sess["session_key"].get<std::string>().size() == 2 * suite.key_len);

    const AttackInfo* info = find_attack("A2-sk");
    REQUIRE(info != nullptr);
    AttackOpts opts;
    opts.trials = 5;
    AttackOutcome o = run_attack(*info, model, suite, 33, opts);
    Json a = attack_report(o);
    CHECK(a["attack"] == "A2-sk");
    CHECK(a["protocol"] == "p2");
    CHECK(a["trials"] == 5);
    CHECK(a["successes"] == 5);
    CHECK(a["success"] == true);
    CHECK(a["withheld"] == false);
    REQUIRE(a.contains("symbolic"));
    CHECK(a["symbolic"]["derivable"] == true);
    CHECK(a["symbolic"]["replay_matches"] == true);
    CHECK(a["notes"].is_array());

    PfsOutcome pfs = pfs_experiment(model, suite, 44);
    Json p = pfs_report("p2", pfs);
    CHECK(p["protocol"] == "p2");
    CHECK(p["applicable"] == true);
    CHECK(p["key_derivable_after_leak"] == true);
    CHECK(p["engine_status"] == "completed");
    CHECK(p["replay_matches"] == true);

    EvaluationMatrix m = evaluate_all(default_data_dir(), suite, 1);
    Json mj = matrix_report(m);
    CHECK(mj["rows"].size() == 12);
    CHECK(mj["asserted_cells"] == 2);
    CHECK(mj["rows"][0]["cells"].size() == 8);
    CHECK(mj["rows"][0]["cells"][0].contains("basis"));

    CostTable table = builtin_cost_table();
    UnitTable units = load_units(default_data_dir() + "/default.units");
    Json cj = cost_report(table, units);
    CHECK(cj["z"] == 5);
    CHECK(cj["rows"].size() == 11);
    bool saw_projection = false;
    for (const auto& row : cj["rows"])
        if (row.contains("projected_time_ms")) saw_projection = true;
    CHECK(saw_projection);
}

TEST_CASE("the full report is byte-identical under one configuration and moves with the seed") {
    WorkbenchConfig cfg;
    cfg.trials = 6;
    std::string first = report_text(full_report(cfg));
    std::string second = report_text(full_report(cfg));
    CHECK(first == second);
    CHECK(first.size() > 1000);
    CHECK(first.back() == '\n');

    WorkbenchConfig moved = cfg;
    moved.seed = 2;
    CHECK(report_text(full_report(moved)) != first);

    Json parsed = Json::parse(first);
    CHECK(parsed["seed"] == 1);
    CHECK(parsed["trials"] == 6);
    CHECK(parsed["sessions"].size() == 11);
    CHECK(parsed["attacks"].size() == 15);
    CHECK(parsed["forward_secrecy"].size() == 12);
    CHECK(parsed["criteria_matrix"]["rows"].size() == 12);
    CHECK(parsed["cost"]["rows"].size() == 11);
}

TEST_CASE("cli: list prints every fixture and attack in both formats") {
    CliRun text = cli({"list"});
    CHECK(text.exit_code == kExitOk);
    CHECK(text.out.find("p1wofs") != std::string::npos);
    CHECK(text.out.find("hardened") != std::string::npos);
    CHECK(text.out.find("A2-sk") != std::string::npos);
    CHECK(text.out.find("A10-mitm") != std::string::npos);

    CliRun json = cli({"--format", "json", "list"});
    CHECK(json.exit_code == kExitOk);
    Json j = Json::parse(json.out);
    CHECK(j["protocols"].size() == 12);
    CHECK(j["attacks"].size() == 12);
}

TEST_CASE("cli: honest runs succeed, metadata-only fixtures refuse to run") {
    CliRun ok = cli({"run", "p2", "--sessions", "2"});
    CHECK(ok.exit_code == kExitOk);
    CHECK(ok.out.find("keys agree") != std::string::npos);
    CHECK(ok.out.find("REJECTS") == std::string::npos);

    CliRun fidelity = cli({"run", "p9"});
    CHECK(fidelity.exit_code == kExitFidelity);
    CHECK(fidelity.err.find("metadata-fidelity") != std::string::npos);

    CliRun missing = cli({"run", "no-such-protocol"});
    CHECK(missing.exit_code == kExitUsage);
}

TEST_CASE("cli: attacks report trial tallies and honour the refusal flags") {
    CliRun ok = cli({"--trials", "20", "attack", "A2-sk"});
    CHECK(ok.exit_code == kExitOk);
    CHECK(ok.out.find("20/20") != std::string::npos);
    CHECK(ok.out.find("trace replays byte-exact") != std::string::npos);

    CliRun withheld = cli({"--trials", "20", "attack", "A2-sk", "--withhold"});
    CHECK(withheld.exit_code == kExitOk);
    CHECK(withheld.out.find("0/20") != std::string::npos);
    CHECK(withheld.out.find("prerequisite withheld") != std::string::npos);

    CliRun refused = cli({"attack", "A5-sk", "--no-compromise"});
    CHECK(refused.exit_code == kExitPrerequisite);
    CHECK(refused.err.find("prerequisite-unmet") != std::string::npos);

    CliRun unknown = cli({"attack", "A99-nothing"});
    CHECK(unknown.exit_code == kExitUsage);
    CHECK(unknown.err.find("unknown-attack") != std::string::npos);

    CliRun mismatch = cli({"attack", "A2-sk", "--protocol", "p3"});
    CHECK(mismatch.exit_code == kExitUsage);
    CHECK(mismatch.err.find("attack-mismatch") != std::string::npos);
}

TEST_CASE("cli: evaluation and cost references both verify clean") {
    CliRun matrix = cli({"evaluate", "--check-reference"});
    CHECK(matrix.exit_code == kExitOk);
    CHECK(matrix.out.find("matches the frozen reference") != std::string::npos);

    CliRun one = cli({"evaluate", "p7"});
    CHECK(one.exit_code == kExitOk);
    CHECK(one.out.find("C4 fail") != std::string::npos);
    CHECK(one.out.find("[source analysis:") != std::string::npos);

    CliRun cost = cli({"cost", "--check-reference"});
    CHECK(cost.exit_code == kExitOk);

    CliRun table = cli({"cost"});
    CHECK(table.exit_code == kExitOk);
    CHECK(table.out.find("Tme") != std::string::npos);

    CliRun json = cli({"--format", "json", "evaluate", "--check-reference"});
    CHECK(json.exit_code == kExitOk);
    Json j = Json::parse(json.out);
    CHECK(j["match"] == true);
    CHECK(j["checked_rows"] == 11);
    CHECK(j["mismatches"].empty());
}

TEST_CASE("cli: deduce distinguishes derivable, underivable, and unreadable inputs") {
    CliRun derivable = cli({"deduce", default_data_dir() + "/kb/p3_attack.kb"});
    CHECK(derivable.exit_code == kExitOk);
    CHECK(derivable.out.find("derivable") != std::string::npos);
    CHECK(derivable.out.find("[group-solve]") != std::string::npos);

    CliRun underivable = cli({"deduce", default_data_dir() + "/kb/p3_attack_missing_fact.kb"});
    CHECK(underivable.exit_code == kExitCheckFailed);
    CHECK(underivable.out.find("not derivable") != std::string::npos);

    CliRun unreadable = cli({"deduce", "/tmp/no-such-kb.kb"});
    CHECK(unreadable.exit_code == kExitUsage);
}

TEST_CASE("cli: usage errors and help") {
    CHECK(cli({}).exit_code == kExitUsage);
    CHECK(cli({"--no-such-flag"}).exit_code == kExitUsage);
    CHECK(cli({"frobnicate"}).exit_code == kExitUsage);

    CliRun help = cli({"--help"});
    CHECK(help.exit_code == kExitOk);
    CHECK(help.out.find("deduce") != std::string::npos);
}

TEST_CASE("cli: the report subcommand is deterministic and honours configuration") {
    std::string cfg_path = write_temp("wb_cli_cfg.json", R"({"seed": 9, "trials": 4})");
    CliRun first = cli({"--config", cfg_path, "report"});
    CliRun second = cli({"--config", cfg_path, "report"});
    CHECK(first.exit_code == kExitOk);
    CHECK(first.out == second.out);

    Json j = Json::parse(first.out);
    CHECK(j["seed"] == 9);
    CHECK(j["trials"] == 4);

    CliRun overridden = cli({"--config", cfg_path, "--seed", "10", "report"});
    Json jo = Json::parse(overridden.out);
    CHECK(jo["seed"] == 10);
    CHECK(overridden.out != first.out);

    std::string out_path = "/tmp/wb_cli_report.json";
    CliRun filed = cli({"--config", cfg_path, "report", "--out", out_path});
    CHECK(filed.exit_code == kExitOk);
    std::ifstream in(out_path);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == first.out);
    std::remove(out_path.c_str());
    std::remove(cfg_path.c_str());
}
