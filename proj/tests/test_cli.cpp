#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "snf/adjoint.hpp"
#include "snf/fixtures.hpp"
#include "snf/kernel.hpp"
#include "snf/lifting.hpp"
#include "snf/multipliers.hpp"
#include "test_helpers.hpp"

using namespace snf;
using nlohmann::json;
namespace fs = std::filesystem;

#ifndef SNF_CLI_PATH
#error "SNF_CLI_PATH must point at the snf binary"
#endif

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

// Scratch directory shared by all CLI test cases in this process.
const fs::path& scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("snf_cli_test_" + std::to_string(static_cast<unsigned>(::getpid())));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path scratch(const std::string& name) { return scratch_dir() / name; }

// Runs the CLI through the shell; env can hold "VAR=value " prefixes.
CliResult run_cli(const std::string& args, const std::string& env = "") {
    static int serial = 0;
    const fs::path out = scratch("stdout_" + std::to_string(serial));
    const fs::path err = scratch("stderr_" + std::to_string(serial));
    ++serial;
    const std::string cmd =
        env + std::string(SNF_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int rc = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = (rc >= 0 && WIFEXITED(rc)) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

const std::string& a4_file() {
    static const std::string p = [] {
        const fs::path f = scratch("a4.txt");
        write_matrix_file(f.string(), fixtures::a4());
        return f.string();
    }();
    return p;
}

const std::string& a7_file() {
    static const std::string p = [] {
        const fs::path f = scratch("a7.txt");
        write_matrix_file(f.string(), fixtures::a7());
        return f.string();
    }();
    return p;
}

} // namespace

TEST_CASE("cli: smith prints the invariant factors") {
    const CliResult r = run_cli("smith " + a4_file());
    CHECK(r.exit_code == 0);
    CHECK(r.out == "1 1 9 29088\n");

    const CliResult j = run_cli("smith " + a4_file() + " --format json");
    CHECK(j.exit_code == 0);
    const json doc = json::parse(j.out);
    CHECK(doc.at("s") == json::array({"1", "1", "9", "29088"}));
}

TEST_CASE("cli: smith reports singular input on exit code 3") {
    const fs::path f = scratch("singular.txt");
    write_matrix_file(f.string(), IntMat::from_rows({{1, 2}, {2, 4}}));
    const CliResult r = run_cli("smith " + f.string());
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("singular") != std::string::npos);
}

TEST_CASE("cli: input errors use exit code 2") {
    const fs::path bad = scratch("bad.txt");
    std::ofstream(bad) << "2 2\n1 2\n3\n"; // truncated body
    CHECK(run_cli("smith " + bad.string()).exit_code == 2);
    CHECK(run_cli("smith " + scratch("does_not_exist.txt").string()).exit_code == 2);
    CHECK(run_cli("smith " + a4_file() + " --no-such-flag").exit_code == 2);
    CHECK(run_cli("").exit_code == 2);            // a subcommand is required
    CHECK(run_cli("--help").exit_code == 0);      // but help is fine
    CHECK(run_cli("solve " + a4_file() + " " + a4_file()).exit_code == 2); // neither --frac nor --mod
}

TEST_CASE("cli: multipliers replay reproduces the frozen run") {
    const std::string prefix = scratch("rep").string();
    const CliResult r =
        run_cli("multipliers " + a7_file() + " --replay-fixture s5 --out-prefix " + prefix);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("S: 1 1 1 1 2 8 80\n") != std::string::npos);
    CHECK(r.out.find("attempts: 1 (not-trivial 0, singular 0)") != std::string::npos);
    CHECK(parse_matrix_file(prefix + ".S.txt") == IntMat::diagonal(fixtures::a7_smith().diag));
    CHECK(parse_matrix_file(prefix + ".V.txt") == fixtures::run7_v());
    CHECK(parse_matrix_file(prefix + ".U.txt") == fixtures::run7_u());
}

TEST_CASE("cli: multipliers replay rejects a mismatched matrix") {
    const CliResult r = run_cli("multipliers " + a4_file() + " --replay-fixture s5 --out-prefix " +
                                scratch("never").string());
    CHECK(r.exit_code == 2);
}

TEST_CASE("cli: multipliers output is deterministic for a fixed seed") {
    Rng gen(801);
    const fs::path f = scratch("rand5.txt");
    write_matrix_file(f.string(), testing::random_nonsingular(5, -99, 99, gen));

    const std::string p1 = scratch("det_a").string();
    const std::string p2 = scratch("det_b").string();
    const CliResult r1 = run_cli("multipliers " + f.string() + " --seed 123 --out-prefix " + p1);
    const CliResult r2 = run_cli("multipliers " + f.string() + " --seed 123 --out-prefix " + p2);
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    CHECK(r1.out.find("seed: 123\n") != std::string::npos);
    CHECK(slurp(p1 + ".V.txt") == slurp(p2 + ".V.txt")); // byte-identical
    CHECK(slurp(p1 + ".U.txt") == slurp(p2 + ".U.txt"));

    // the SNF_SEED environment variable is an equivalent way to pin the run
    const std::string p3 = scratch("det_c").string();
    const CliResult r3 =
        run_cli("multipliers " + f.string() + " --out-prefix " + p3, "SNF_SEED=123 ");
    REQUIRE(r3.exit_code == 0);
    CHECK(slurp(p1 + ".V.txt") == slurp(p3 + ".V.txt"));

    // jobs must not affect the result, only the schedule
    const std::string p4 = scratch("det_d").string();
    const CliResult r4 =
        run_cli("multipliers " + f.string() + " --seed 123 --jobs 4 --out-prefix " + p4);
    REQUIRE(r4.exit_code == 0);
    CHECK(slurp(p1 + ".V.txt") == slurp(p4 + ".V.txt"));
    CHECK(slurp(p1 + ".U.txt") == slurp(p4 + ".U.txt"));
}

TEST_CASE("cli: verify accepts a good triple and flags a corrupted one") {
    const std::string prefix = scratch("ver").string();
    REQUIRE(run_cli("multipliers " + a4_file() + " --seed 5 --out-prefix " + prefix).exit_code == 0);

    const std::string files = a4_file() + " " + prefix + ".S.txt " + prefix + ".U.txt " + prefix +
                              ".V.txt";
    const CliResult good = run_cli("verify " + files);
    CHECK(good.exit_code == 0);
    CHECK(good.out.find("A V = U S: ok") != std::string::npos);
    CHECK(good.out.find("|det V| = 1: ok") != std::string::npos);
    CHECK(good.out.find("|det U| = 1: ok") != std::string::npos);

    // corrupt one entry of V and watch the check fail
    IntMat v = parse_matrix_file(prefix + ".V.txt");
    MatBuf vb = v.thaw();
    vb.at(0, 0) += 1;
    write_matrix_file(prefix + ".V.txt", vb.freeze());
    const CliResult bad = run_cli("verify " + files);
    CHECK(bad.exit_code == 1);
    CHECK(bad.out.find("A V = U S: FAILED") != std::string::npos);
}

TEST_CASE("cli: fractional solve") {
    const fs::path b = scratch("b4.txt");
    write_matrix_file(b.string(), IntMat::from_vec({Int(25), Int(94), Int(12), Int(-2)}));
    const CliResult r = run_cli("solve " + a4_file() + " " + b.string() + " --frac --seed 9");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "s = 29088\n11011 20716 8682 17424\n");
}

TEST_CASE("cli: modular solve") {
    const fs::path b = scratch("bmod.txt");
    write_matrix_file(b.string(), IntMat::from_vec({Int(1), Int(0), Int(3), Int(-7)}));
    const CliResult r =
        run_cli("solve " + a4_file() + " " + b.string() + " --mod 2 --seed 11 --format json");
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.out);
    const Int x_mod(doc.at("X").get<std::string>());
    const Int xd = x_mod * x_mod; // d = 2
    CHECK(doc.at("d") == 2);

    MatBuf xb(4, 1);
    for (int i = 0; i < 4; ++i)
        xb.at(i, 0) = Int(doc.at("x").at(i).at(0).get<std::string>());
    const IntMat x = xb.freeze();
    // A x == b (mod X^2)
    const IntMat bb = parse_matrix_file(b.string());
    CHECK(mat_mod(matmul(fixtures::a4(), x), xd) == mat_mod(bb, xd));
}

TEST_CASE("cli: linearize emits the expanded matrix") {
    const fs::path f = scratch("l4.txt");
    write_matrix_file(f.string(), fixtures::l4());
    const CliResult r = run_cli("linearize " + f.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("# mode=cols d=14\n") == 0);
    std::istringstream in(r.out); // the comment line is skipped by the parser
    CHECK(parse_matrix(in) == fixtures::l4_linearized());

    const CliResult p = run_cli("linearize " + f.string() + " --mode permut --format json");
    CHECK(p.exit_code == 0);
    const json doc = json::parse(p.out);
    CHECK(doc.contains("row_perm"));
    CHECK(doc.contains("col_perm"));
    CHECK(doc.at("mode") == "permut");

    CHECK(run_cli("linearize " + f.string() + " --mode sideways").exit_code == 2);
}

TEST_CASE("cli: hermite-trivial prints the dense form or refuses") {
    const fs::path b7 = scratch("b7.txt");
    write_matrix_file(b7.string(), fixtures::run7_b());
    const CliResult r = run_cli("hermite-trivial " + b7.string());
    CHECK(r.exit_code == 0);
    std::istringstream in(r.out);
    const auto th = trivial_lower_hermite(fixtures::run7_b());
    REQUIRE(th.has_value());
    CHECK(parse_matrix(in) == hermite_from_trivial(7, *th));

    const fs::path nt = scratch("nt.txt");
    write_matrix_file(nt.string(), IntMat::diagonal({Int(2), Int(3)}));
    const CliResult miss = run_cli("hermite-trivial " + nt.string());
    CHECK(miss.exit_code == 1);
    CHECK(miss.out == "NotTrivial\n");
}

TEST_CASE("cli: opa writes a loadable compact inverse") {
    const fs::path out = scratch("a4.opa.json");
    const CliResult r = run_cli("opa " + a4_file() + " --seed 31 --out " + out.string());
    CHECK(r.exit_code == 0);
    const OuterProductAdjoint opa = opa_from_json(slurp(out));
    CHECK(opa.n() == 4);
    CHECK(opa.s() == 29088);
    CHECK(frac_inverse(opa) == mat_mod(fixtures::a4_scaled_inverse(), Int(29088)));

    const CliResult direct = run_cli("opa " + a4_file() + " --seed 31");
    CHECK(direct.exit_code == 0);
    CHECK(frac_inverse(opa_from_json(direct.out)) ==
          mat_mod(fixtures::a4_scaled_inverse(), Int(29088)));
}

TEST_CASE("cli: lambda override below the bound needs the unsafe flag") {
    const CliResult refused =
        run_cli("multipliers " + a7_file() + " --seed 3 --lambda-override 10 --out-prefix " +
                scratch("lam").string());
    CHECK(refused.exit_code == 2);

    // with the flag the run proceeds (it may retry, hence the generous budget)
    const CliResult allowed =
        run_cli("multipliers " + a7_file() + " --seed 3 --lambda-override 10 --unsafe-lambda " +
                "--max-retries 200 --out-prefix " + scratch("lam2").string());
    CHECK((allowed.exit_code == 0 || allowed.exit_code == 1));
}
