#include <doctest.h>
#include <omp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "hgf/cli.hpp"
#include "hgf/config.hpp"
#include "hgf/errors.hpp"
#include "hgf/io.hpp"

using namespace hgf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hgf_test_io_cli") / name;
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

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "run.cfg";
    std::ofstream(p) << text;
    return p;
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::InvalidState;
}

const char* kPerturbed =
    "command = simulate\n"
    "grid.points = 16\n"
    "preset.base = conformal_torus\n"
    "preset.epsilon = 0.1\n"
    "preset.mode = 1,2\n"
    "velocity.kind = random_smooth\n"
    "velocity.amplitude = 0.05\n"
    "velocity.seed = 9\n"
    "step.fixed_dt = 0.05\n"
    "step.t_end = 0.5\n"
    "step.snapshot_stride = 5\n";

}  // namespace

TEST_CASE("snapshot files round trip") {
    const fs::path dir = scratch("roundtrip");
    MetricPreset p;
    p.base = BaseKind::RandomSmooth;
    p.seed = 4;
    p.velocity = {VelocityKind::RandomSmooth, 0.1, 2};
    const ChartGrid grid = torus_grid(3, 8);
    const PresetState ps = instantiate(p, grid);
    Snapshot s{0.75, 12, ps.g, ps.h, curvature(ps.g)};
    io::write_snapshot(dir / "a.bin", s);
    const io::SnapshotFile f = io::read_snapshot(dir / "a.bin");
    CHECK(f.grid == grid);
    CHECK(f.t == 0.75);
    CHECK(f.step == 12);
    REQUIRE(f.fields.size() == 4);
    const Field* want[] = {&s.g.g, &s.h.h, &s.curvature->ricci, &s.curvature->scalar};
    const char* names[] = {"g", "h", "ricci", "scalar"};
    for (int k = 0; k < 4; ++k) {
        CHECK(f.fields[k].first == names[k]);
        CHECK(f.fields[k].second.rank() == want[k]->rank());
        const auto a = f.fields[k].second.values();
        const auto b = want[k]->values();
        REQUIRE(a.size() == b.size());
        CHECK(std::equal(a.begin(), a.end(), b.begin()));
    }

    s.curvature.reset();
    io::write_snapshot(dir / "b.bin", s);
    CHECK(io::read_snapshot(dir / "b.bin").fields.size() == 2);
}

TEST_CASE("malformed snapshot files are rejected") {
    const fs::path dir = scratch("malformed");
    std::ofstream(dir / "tag.bin") << "NOTASNAPSHOT-AT-ALL";
    CHECK(kind_of([&] { io::read_snapshot(dir / "tag.bin"); }) == ErrorKind::Io);
    CHECK(kind_of([&] { io::read_snapshot(dir / "missing.bin"); }) == ErrorKind::Io);

    const ChartGrid grid = torus_grid(2, 8);
    const PresetState ps = instantiate(MetricPreset{}, grid);
    io::write_snapshot(dir / "full.bin", Snapshot{0.0, 0, ps.g, ps.h, std::nullopt});
    const std::string bytes = slurp(dir / "full.bin");
    std::ofstream(dir / "cut.bin", std::ios::binary) << bytes.substr(0, bytes.size() - 8);
    CHECK(kind_of([&] { io::read_snapshot(dir / "cut.bin"); }) == ErrorKind::Io);
}

TEST_CASE("config text round trips through the parser") {
    RunConfig c = parse_config(kPerturbed);
    CHECK(c.command == Command::Simulate);
    CHECK(c.preset.base == BaseKind::ConformalTorus);
    CHECK(c.preset.mode == std::array<int, 3>{1, 2, 0});
    CHECK(c.preset.velocity.seed == 9);
    CHECK(c.step.fixed_dt == 0.05);
    CHECK(std::isinf(c.step.dt_max));
    const std::string text = to_text(c);
    CHECK(to_text(parse_config(text)) == text);

    const RunConfig v = parse_config("command = verify\nverify.ladder = 16, 24,32\nverify.checks = static,integrator\n"
                                     "verify.mode = oracle\noracle.t_samples = 0,0.5\ndiagnose.t_blowup = 1\n");
    CHECK(v.ladder == std::vector<int>{16, 24, 32});
    CHECK(v.checks == (static_cast<unsigned>(CheckSet::Static) | static_cast<unsigned>(CheckSet::Integrator)));
    CHECK(v.mode == CheckMode::Oracle);
    CHECK(v.t_samples == std::vector<double>{0.0, 0.5});
    CHECK(v.t_blowup == 1.0);
}

TEST_CASE("config errors") {
    const char* bad[] = {
        "grid.pionts = 16\n",          // unknown key
        "grid.dim = 2\ngrid.dim = 3\n",  // repeated key
        "grid.dim = 4\n",
        "grid.points = sixteen\n",
        "step.cfl = 0.25x\n",
        "just some words\n",
        "verify.checks = static,everything\n",
        "flow.kind = surface2d\ngrid.dim = 3\n",
        "preset.base = klein_bottle\n",
        "output.snapshots = yes\n",
    };
    for (const char* text : bad) {
        INFO(text);
        CHECK(kind_of([&] { parse_config(text); }) == ErrorKind::ConfigError);
    }
    CHECK(kind_of([] { load_config("/nonexistent/run.cfg"); }) == ErrorKind::ConfigError);
    // Comments and blank lines are ignored.
    CHECK(parse_config("# nothing\n\n   \ncommand = oracle\n").command == Command::Oracle);
}

TEST_CASE("master seed derives the component seeds") {
    const RunConfig c = parse_config("run.seed = 40\npreset.seed = 1\n");
    CHECK(c.seed == 40u);
    CHECK(c.preset.seed == 40u);
    CHECK(c.preset.velocity.seed == 41u);
}

TEST_CASE("cli exit codes") {
    const fs::path dir = scratch("exit");
    std::ostringstream log;

    cli::Invocation flat;
    flat.config = write_config(dir, "command = verify\ngrid.points = 16\nverify.ladder = 16,32\nverify.mode = oracle\n");
    flat.out_dir = (dir / "flat").string();
    flat.quiet = true;
    CHECK(cli::execute(flat, log) == cli::kExitOk);
    CHECK(fs::exists(dir / "flat" / "report.ndjson"));
    CHECK(fs::exists(dir / "flat" / "series" / "bianchi1.riemann.dat"));

    cli::Invocation bad = flat;
    bad.config = write_config(dir, "command = verify\nverify.nonsense = 1\n");
    bad.out_dir = (dir / "bad").string();
    CHECK(cli::execute(bad, log) == cli::kExitConfig);
    CHECK(slurp(dir / "bad" / "error.json").find("ConfigError") != std::string::npos);

    cli::Invocation missing = flat;
    missing.config = dir / "absent.cfg";
    CHECK(cli::execute(missing, log) == cli::kExitConfig);

    cli::Invocation degenerate = flat;
    degenerate.config = write_config(dir,
                                     "command = simulate\ngrid.points = 16\npreset.family = quadratic\npreset.c1 = -2\n"
                                     "step.t_end = 2\nstep.snapshot_stride = 10\n");
    degenerate.out_dir = (dir / "degenerate").string();
    CHECK(cli::execute(degenerate, log) == cli::kExitFailure);
    CHECK(slurp(dir / "degenerate" / "summary.json").find("BlowUpDetected") != std::string::npos);

    // The injected Q sign error is caught in oracle mode.
    cli::Invocation mutated = flat;
    mutated.config = write_config(dir,
                                  "command = verify\ngrid.chart = sphere_band\ngrid.points = 32\n"
                                  "preset.base = sphere_band\nverify.ladder = 32\nverify.mode = oracle\n"
                                  "verify.inject_q_sign_error = true\n");
    mutated.out_dir = (dir / "mutated").string();
    CHECK(cli::execute(mutated, log) == cli::kExitFailure);
}

TEST_CASE("simulate outputs are byte-identical across thread counts") {
    const fs::path dir = scratch("threads");
    const fs::path cfg = write_config(dir, kPerturbed);
    const int saved = omp_get_max_threads();
    std::ostringstream log;
    for (int threads : {1, 3}) {
        omp_set_num_threads(threads);
        cli::Invocation inv;
        inv.config = cfg;
        inv.out_dir = (dir / std::to_string(threads)).string();
        inv.quiet = true;
        REQUIRE(cli::execute(inv, log) == cli::kExitOk);
    }
    omp_set_num_threads(saved);
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir / "1")) {
        if (!e.is_regular_file()) continue;
        const fs::path rel = fs::relative(e.path(), dir / "1");
        if (rel == "config.txt") continue;  // records output.dir
        INFO(rel.string());
        CHECK(slurp(e.path()) == slurp(dir / "3" / rel));
        ++files;
    }
    CHECK(files == 7);  // 3 snapshots, index, diagnostics, ricci_sup, summary
    CHECK(fs::exists(dir / "1" / "snapshots" / "step_000010.bin"));
}
