#include <doctest.h>

#include "commands.hpp"
#include "run_config.hpp"

#include "occ/numerics.hpp"
#include "occ/pgm.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace occ;
using namespace occ::app;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("occ_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::string config_error(const json& j) {
    try {
        (void)parse_config(j);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
        return e.what();
    }
    return "";
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(OCC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string bits_text(const Bits& bits) {
    std::string s;
    for (auto b : bits) {
        s.push_back(static_cast<char>('0' + b));
        s.push_back('\n');
    }
    return s;
}

} // namespace

TEST_CASE("config defaults and resolved echo") {
    const RunConfig cfg = parse_config(json::object());
    CHECK(cfg.modulation_order == 2);
    CHECK(cfg.preamble_length == 31);
    CHECK(cfg.equalizer_taps == 31);
    CHECK(cfg.channel_memory == 2);
    CHECK(!cfg.delay);
    CHECK(!cfg.snr_db);
    CHECK(!cfg.led_cutoff_hz);
    const json echo = to_json(cfg);
    CHECK(echo["schema_version"] == kSchemaVersion);
    CHECK(echo["camera"]["rows"].is_number_unsigned());
    CHECK(echo["delay"] == "auto");
    CHECK(to_json(parse_config(echo)) == echo);
}

TEST_CASE("config accepts keyword values") {
    const RunConfig cfg = parse_config(json{{"offset_fraction", "random"},
                                            {"snr_db", 12.5},
                                            {"led_cutoff_hz", 2e5},
                                            {"delay", 3},
                                            {"camera", {{"rows", "auto"}, {"bit_depth", 16}}},
                                            {"payload", "0110"},
                                            {"preamble", {1, -1, 1, 1}},
                                            {"channel_memory", 1}});
    CHECK(!cfg.offset_fraction);
    CHECK(*cfg.snr_db == 12.5);
    CHECK(*cfg.led_cutoff_hz == 2e5);
    CHECK(*cfg.delay == 3);
    CHECK(cfg.bit_depth == 16);
    CHECK(cfg.payload_bit_count() == 4);
    CHECK(cfg.preamble_symbols() == Symbols{1, -1, 1, 1});
    CHECK(parse_config(json{{"snr_db", "noiseless"}}).snr_db == std::nullopt);
}

TEST_CASE("config errors name the field") {
    CHECK(config_error(json{{"bogus", 1}}).find("bogus") != std::string::npos);
    CHECK(config_error(json{{"camera", {{"colz", 3}}}}).find("camera.colz") != std::string::npos);
    CHECK(config_error(json{{"modulation_order", 3}}).find("modulation_order") != std::string::npos);
    CHECK(config_error(json{{"offset_fraction", 1.0}}).find("offset_fraction") != std::string::npos);
    CHECK(config_error(json{{"offset_fraction", "sometimes"}}).find("offset_fraction") != std::string::npos);
    CHECK(config_error(json{{"equalizer_taps", -2}}).find("equalizer_taps") != std::string::npos);
    CHECK(config_error(json{{"camera", {{"bit_depth", 10}}}}).find("bit_depth") != std::string::npos);
    CHECK(config_error(json{{"schema_version", 99}}).find("schema_version") != std::string::npos);
    CHECK(config_error(json{{"payload", "01x"}}).find("payload") != std::string::npos);
    CHECK(config_error(json{{"preamble", {1, 0.5}}}).find("preamble") != std::string::npos);
    CHECK(config_error(json{{"oversampling", 1}}).find("oversampling") != std::string::npos);
    CHECK(config_error(json{{"sweep", {{"trials", 0}}}}).find("sweep.trials") != std::string::npos);
}

TEST_CASE("apply_override") {
    json tree = json::object();
    apply_override(tree, "camera.rows=120");
    apply_override(tree, "offset_fraction=random");
    apply_override(tree, "sweep.offsets=[0,0.5]");
    CHECK(tree["camera"]["rows"] == 120);
    CHECK(tree["offset_fraction"] == "random");
    CHECK(tree["sweep"]["offsets"].size() == 2);
    CHECK_THROWS_AS(apply_override(tree, "novalue"), Error);
}

TEST_CASE("format_double") {
    CHECK(format_double(0.25) == "0.25");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-0.1) == "-0.1");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("simulate at perfect sync") {
    const auto dir = scratch("sim0");
    const RunConfig cfg = parse_config(json{{"payload_bits", 400}, {"master_seed", 9}});
    REQUIRE(cmd_simulate(cfg, dir) == kExitOk);
    const json rep = load(dir / "report.json");
    CHECK(rep["status"] == "ok");
    CHECK(rep["report"]["ber"] == 0.0);
    CHECK(rep["report"]["n_bits"] == 400);
    CHECK(rep["config"] == to_json(cfg));

    const auto rows = csv_rows(dir / "samples.csv");
    REQUIRE(rows.size() == 1 + 31 + 400);
    CHECK(rows[0] == std::vector<std::string>{"index", "tx_symbol", "y_raw", "y_normalized", "y_equalized",
                                              "sliced_symbol"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::abs(std::stod(rows[i][3]) - std::stod(rows[i][1])) <= 1e-12);
        CHECK(rows[i][5] == rows[i][1]);
    }
    CHECK(fs::exists(dir / "capture.pgm"));
    CHECK(!fs::exists(dir / "waveform.csv"));
}

TEST_CASE("simulate is byte-reproducible") {
    const auto a = scratch("rep_a"), b = scratch("rep_b");
    const RunConfig cfg = parse_config(json{{"payload_bits", 300},
                                            {"snr_db", 15},
                                            {"offset_fraction", "random"},
                                            {"modulation_order", 4}});
    cmd_simulate(cfg, a, {true});
    cmd_simulate(cfg, b, {true});
    for (const char* f : {"samples.csv", "report.json", "capture.pgm", "waveform.csv"}) {
        CAPTURE(f);
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK(!slurp(a / f).empty());
    }
}

TEST_CASE("simulate: six distinct pixel rows at the Nyquist rate") {
    const auto dir = scratch("nyquist_rows");
    const RunConfig cfg = parse_config(json{{"preamble", {1, -1}},
                                            {"payload", "1001"},
                                            {"lead_idle_symbols", 0},
                                            {"channel_memory", 0},
                                            {"equalizer_taps", 1},
                                            {"delay", 0},
                                            {"camera", {{"rows", 6}, {"cols", 16}}}});
    CHECK(cmd_simulate(cfg, dir) == kExitOk);
    const auto img = read_pgm(dir / "capture.pgm");
    REQUIRE(img.rows == 6);
    const std::vector<std::uint16_t> expect{255, 0, 255, 0, 0, 255};
    for (std::size_t r = 0; r < 6; ++r)
        for (std::size_t c = 0; c < 16; ++c) CHECK(img.at(r, c) == expect[r]);
    CHECK(load(dir / "report.json")["report"]["ber"] == 0.0);
}

TEST_CASE("simulate: square-wave contrast versus offset") {
    std::string alternating;
    for (int i = 0; i < 64; ++i) alternating += (i % 2 == 0) ? "1" : "0";
    const std::vector<std::pair<double, double>> cases{{0.0, 2.0}, {0.25, 1.0}, {0.5, 0.0}};
    for (const auto& [f, contrast] : cases) {
        const auto dir = scratch("square_wave");
        const RunConfig cfg = parse_config(json{{"preamble", {1, -1, 1, -1, 1, -1, 1, -1}},
                                                {"payload", alternating},
                                                {"offset_fraction", f},
                                                {"channel_memory", 0},
                                                {"equalizer_taps", 1}});
        const int code = cmd_simulate(cfg, dir);
        const json rep = load(dir / "report.json");
        CHECK(std::abs(rep["capture"]["row_contrast"].get<double>() - contrast) <= 1e-6);
        // Fully blurred rows carry no modulation to lock onto.
        if (f == 0.5) {
            CHECK(code == kExitSyncFailure);
            CHECK(rep["reason"] == "sync_failure");
        } else {
            CHECK(code == kExitOk);
        }
    }
}

TEST_CASE("sweep-ber") {
    const auto dir = scratch("sweep");
    const RunConfig cfg = parse_config(
        json{{"payload_bits", 10000}, {"sweep", {{"offsets", {0, 0.25, 0.5}}, {"trials", 2}, {"threads", 3}}}});
    REQUIRE(cmd_sweep_ber(cfg, dir) == kExitOk);
    const auto rows = csv_rows(dir / "sweep.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::vector<std::string>{"offset_fraction", "snr_db", "n_bits", "ber_no_eq", "ber_zf",
                                              "mean_residual_isi"});
    CHECK(rows[1][0] == "0");
    CHECK(rows[1][1] == "inf");
    CHECK(rows[1][2] == "20000");
    CHECK(rows[1][4] == "0");
    CHECK(rows[2][4] == "0");
    CHECK(std::abs(std::stod(rows[3][3]) - 0.25) <= 0.02);
    CHECK(std::stod(rows[3][5]) > 0.1);
}

TEST_CASE("sweep-ber output is independent of thread count") {
    json base{{"payload_bits", 2000},
              {"master_seed", 1234},
              {"sweep", {{"offsets", {0.1, "random", 0.45}}, {"snr_db", {nullptr, 8, 14}}, {"trials", 5}}}};
    std::string first;
    for (unsigned threads : {1u, 1u, 2u, 8u}) {
        base["sweep"]["threads"] = threads;
        const auto dir = scratch("det" + std::to_string(threads));
        REQUIRE(cmd_sweep_ber(parse_config(base), dir) == kExitOk);
        const std::string text = slurp(dir / "sweep.csv");
        if (first.empty()) first = text;
        CHECK(text == first);
    }
    base["master_seed"] = 1235;
    const auto dir = scratch("det_other");
    cmd_sweep_ber(parse_config(base), dir);
    CHECK(slurp(dir / "sweep.csv") != first);
}

TEST_CASE("decode-image round trips") {
    struct Case {
        unsigned order;
        double offset;
    };
    for (const Case c : {Case{2, 0.25}, Case{4, 0.2}}) {
        CAPTURE(c.order);
        const auto sim = scratch("img_sim"), dec = scratch("img_dec");
        const RunConfig cfg =
            parse_config(json{{"modulation_order", c.order}, {"payload_bits", 2000}, {"offset_fraction", c.offset}});
        REQUIRE(cmd_simulate(cfg, sim) == kExitOk);
        REQUIRE(cmd_decode_image(sim / "capture.pgm", cfg, dec) == kExitOk);
        const TrialSeeds seeds = TrialSeeds::from(derive_seed(cfg.master_seed, 0));
        CHECK(slurp(dec / "decoded.bits") == bits_text(cfg.payload_for(seeds.payload)));
        const json rep = load(dec / "report.json");
        CHECK(rep["status"] == "ok");
        CHECK(rep["reference_ber"] == 0.0);
        CHECK(rep["estimated_taps"].size() == 3);
    }
}

TEST_CASE("decode-image failures") {
    const RunConfig cfg = parse_config(json::object());
    const auto dir = scratch("gray");
    write_pgm(dir / "gray.pgm", StripeImage{200, 8, 8, std::vector<std::uint16_t>(200 * 8, 128)});
    CHECK(cmd_decode_image(dir / "gray.pgm", cfg, dir / "out") == kExitUnusableCapture);
    json rep = load(dir / "out" / "report.json");
    CHECK(rep["status"] == "error");
    CHECK(rep["reason"] == "unusable_capture");

    CHECK(cmd_decode_image(dir / "missing.pgm", cfg, dir / "out2") == kExitIo);
    CHECK(load(dir / "out2" / "report.json")["reason"] == "io");

    // Random stripes: no preamble to find.
    std::vector<std::uint16_t> px;
    CounterRng rng(3);
    for (int r = 0; r < 31; ++r) {
        const auto v = static_cast<std::uint16_t>(rng.next_u64() % 256);
        for (int c = 0; c < 4; ++c) px.push_back(v);
    }
    write_pgm(dir / "noise.pgm", StripeImage{31, 4, 8, px});
    CHECK(cmd_decode_image(dir / "noise.pgm", cfg, dir / "out3") == kExitSyncFailure);
    CHECK(load(dir / "out3" / "report.json")["reason"] == "sync_failure");
}

TEST_CASE("offset-demo") {
    const auto dir = scratch("demo");
    const RunConfig cfg = parse_config(json{{"oversampling", 256}});
    REQUIRE(cmd_offset_demo(cfg, dir) == kExitOk);
    const auto rows = csv_rows(dir / "taps.csv");
    REQUIRE(rows.size() == 6);
    const std::vector<double> offsets{0, 0.1, 0.25, 0.4, 0.5};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(std::stod(rows[i + 1][0]) == offsets[i]);
        CHECK(std::stod(rows[i + 1][1]) == doctest::Approx(1 - offsets[i]));
        CHECK(std::abs(std::stod(rows[i + 1][3]) - (1 - offsets[i])) <= 1e-3);
        CHECK(std::abs(std::stod(rows[i + 1][4]) - offsets[i]) <= 1e-3);
        CHECK(std::stod(rows[i + 1][5]) <= 1e-3);
    }
}

TEST_CASE("exit codes are distinct") {
    std::set<int> codes{kExitOk};
    for (ErrorKind k : {ErrorKind::Config, ErrorKind::Shape, ErrorKind::Domain, ErrorKind::SyncFailure,
                        ErrorKind::UnusableCapture, ErrorKind::EstimationSingular, ErrorKind::DesignSingular,
                        ErrorKind::Io}) {
        codes.insert(exit_code_for(k));
    }
    CHECK(codes.size() == 9);
}

TEST_CASE("command-line binary") {
    const auto dir = scratch("bin");
    {
        std::ofstream cfg(dir / "cfg.json");
        cfg << R"({"schema_version": 1, "payload_bits": 200, "offset_fraction": 0.25})";
    }
    const std::string c = "--config " + (dir / "cfg.json").string();
    CHECK(run_cli("simulate " + c + " --out " + (dir / "s").string()) == 0);
    CHECK(load(dir / "s" / "report.json")["report"]["ber"] == 0.0);
    CHECK(run_cli("simulate " + c + " --out " + (dir / "s2").string() + " --seed 5 --offset 0.1 --order 4") == 0);
    const json rep = load(dir / "s2" / "report.json");
    CHECK(rep["config"]["master_seed"] == 5);
    CHECK(rep["config"]["modulation_order"] == 4);
    CHECK(rep["config"]["offset_fraction"] == 0.1);
    CHECK(run_cli("simulate " + c + " --set camera.cols=4 --out " + (dir / "s3").string()) == 0);
    CHECK(read_pgm(dir / "s3" / "capture.pgm").cols == 4);

    CHECK(run_cli("decode-image " + (dir / "s" / "capture.pgm").string() + " " + c + " --out " +
                  (dir / "d").string()) == 0);
    CHECK(run_cli("decode-image " + (dir / "nope.pgm").string() + " --out " + (dir / "d2").string()) == kExitIo);
    CHECK(run_cli("simulate --set modulation_order=3 --out " + (dir / "x").string()) == kExitConfig);
    CHECK(run_cli("simulate --bogus-flag") == kExitConfig);
    CHECK(run_cli("") == kExitConfig);
    CHECK(run_cli("offset-demo --out " + (dir / "o").string()) == 0);
    CHECK(run_cli("sweep-ber --set sweep.offsets=[0.25] --payload-bits 500 --threads 2 --out " +
                  (dir / "w").string()) == 0);
    CHECK(fs::exists(dir / "w" / "sweep.csv"));
}
