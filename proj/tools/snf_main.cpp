// snf: Smith normal form with unimodular multipliers, plus the supporting
// pipeline stages (massagers, partial linearization, p-adic solving, compact
// fractional inverses) exposed as subcommands.
//
// Exit codes: 0 success, 1 algorithmic failure (NotTrivial / retries
// exhausted / failed verification), 2 input error, 3 singular matrix.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "snf/adjoint.hpp"
#include "snf/errors.hpp"
#include "snf/fixtures.hpp"
#include "snf/intmat.hpp"
#include "snf/kernel.hpp"
#include "snf/lifting.hpp"
#include "snf/linearize.hpp"
#include "snf/massager.hpp"
#include "snf/multipliers.hpp"
#include "snf/rng.hpp"

#include <json.hpp>

namespace {

using namespace snf;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitAlgorithmic = 1;
constexpr int kExitInput = 2;
constexpr int kExitSingular = 3;

struct CommonOpts {
    std::optional<std::uint64_t> seed;
    int max_retries = 40;
    int jobs = 1;
    std::string format = "text";
    std::optional<std::string> lambda_override;
    bool unsafe_lambda = false;
};

void add_seed_opts(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--seed", c.seed, "64-bit seed (falls back to the SNF_SEED env var)");
    cmd->add_option("--max-retries", c.max_retries, "retry budget for the Las Vegas loop")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--jobs", c.jobs, "parallel retry attempts")->check(CLI::PositiveNumber);
    cmd->add_option("--lambda-override", c.lambda_override,
                    "perturbation bound override (testing; needs --unsafe-lambda if below the "
                    "certified bound)");
    cmd->add_flag("--unsafe-lambda", c.unsafe_lambda,
                  "allow a lambda override smaller than the certified bound");
}

void add_format_opt(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"text", "json"}));
}

std::uint64_t resolve_seed(const CommonOpts& c) {
    if (c.seed) return *c.seed;
    if (const char* env = std::getenv("SNF_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw parse_error("SNF_SEED is not a valid 64-bit integer");
        }
    }
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

SfmOptions build_sfm_options(const CommonOpts& c) {
    SfmOptions opts;
    opts.max_retries = c.max_retries;
    opts.jobs = c.jobs;
    opts.allow_small_lambda = c.unsafe_lambda;
    if (c.lambda_override) {
        Int lambda;
        try {
            lambda = Int(*c.lambda_override);
        } catch (const std::invalid_argument&) {
            throw parse_error("--lambda-override is not an integer");
        }
        if (lambda <= 0) throw parse_error("--lambda-override must be positive");
        opts.lambda_override = lambda;
    }
    return opts;
}

json matrix_to_json(const IntMat& a) {
    json rows = json::array();
    for (int i = 0; i < a.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < a.cols(); ++j) row.push_back(a.at(i, j).get_str());
        rows.push_back(std::move(row));
    }
    return rows;
}

json diag_to_json(const SmithForm& s) {
    json d = json::array();
    for (int i = 0; i < s.n(); ++i) d.push_back(s.s(i).get_str());
    return d;
}

std::string diag_to_text(const SmithForm& s) {
    std::ostringstream out;
    for (int i = 0; i < s.n(); ++i) {
        if (i) out << ' ';
        out << s.s(i).get_str();
    }
    return out.str();
}

SmithForm parse_diag_file(const std::string& path) {
    const IntMat m = parse_matrix_file(path);
    IntVec diag;
    if (m.rows() == 1 || m.cols() == 1) {
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) diag.push_back(m.at(i, j));
    } else if (m.rows() == m.cols()) {
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j)
                if (i != j && m.at(i, j) != 0)
                    throw parse_error(path + ": expected a diagonal matrix or a vector");
        for (int i = 0; i < m.rows(); ++i) diag.push_back(m.at(i, i));
    } else {
        throw parse_error(path + ": expected a diagonal matrix or a vector");
    }
    return SmithForm(std::move(diag));
}

// ---------------------------------------------------------------------------

int cmd_smith(const std::string& file, const CommonOpts& c) {
    const IntMat a = parse_matrix_file(file);
    const SmithMassager sm = smith_massager(a);
    if (c.format == "json") {
        json j{{"s", diag_to_json(sm.S)}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << diag_to_text(sm.S) << '\n';
    }
    return kExitOk;
}

int cmd_multipliers(const std::string& file, const std::string& prefix,
                    const std::string& replay_fixture, const CommonOpts& c) {
    const IntMat a = parse_matrix_file(file);
    const std::uint64_t seed = resolve_seed(c);
    Rng rng(seed);

    SmithForm replay_two_s;
    IntMat replay_m, replay_r;
    SfmOptions opts;
    if (!replay_fixture.empty()) {
        if (replay_fixture != "s5")
            throw parse_error("unknown replay fixture '" + replay_fixture + "' (available: s5)");
        if (a != fixtures::a7())
            throw parse_error("--replay-fixture s5 requires the matching 7x7 fixture matrix");
        replay_two_s = fixtures::a7_two_smith();
        replay_m = fixtures::run7_massager_m();
        replay_r = fixtures::run7_perturbation();
        opts = build_sfm_options(c);
        opts.inject_two_s = &replay_two_s;
        opts.inject_m = &replay_m;
        opts.inject_r = &replay_r;
    } else {
        opts = build_sfm_options(c);
    }

    SfmStats stats;
    const SmithMultipliers t = smith_form_multipliers(a, rng, opts, &stats);

    write_matrix_file(prefix + ".S.txt", IntMat::diagonal(t.S.diag));
    write_matrix_file(prefix + ".V.txt", t.V);
    write_matrix_file(prefix + ".U.txt", t.U);

    if (c.format == "json") {
        json j{{"s", diag_to_json(t.S)},
               {"seed", seed},
               {"attempts", stats.attempts},
               {"not_trivial", stats.not_trivial},
               {"singular_perturbations", stats.fails},
               {"verified", "A V = U S exact; |det V| = |det U| = 1 certified"},
               {"files",
                {prefix + ".S.txt", prefix + ".V.txt", prefix + ".U.txt"}}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "S: " << diag_to_text(t.S) << '\n'
                  << "seed: " << seed << '\n'
                  << "attempts: " << stats.attempts << " (not-trivial " << stats.not_trivial
                  << ", singular " << stats.fails << ")\n"
                  << "verified: A V = U S exact; |det V| = |det U| = 1 certified\n"
                  << "wrote: " << prefix << ".S.txt " << prefix << ".V.txt " << prefix
                  << ".U.txt\n";
    }
    return kExitOk;
}

int cmd_solve(const std::string& afile, const std::string& bfile, bool frac,
              std::optional<int> mod_digits, const CommonOpts& c) {
    if (!frac && !mod_digits) throw parse_error("solve: pass either --frac or --mod D");
    const IntMat a = parse_matrix_file(afile);
    const IntMat b = parse_matrix_file(bfile);
    if (a.rows() != b.rows())
        throw dimension_error("solve: right-hand side row count does not match A");
    const std::uint64_t seed = resolve_seed(c);
    Rng rng(seed);

    if (frac) {
        if (b.cols() != 1) throw dimension_error("solve --frac: right-hand side must be a column");
        const SfmOptions opts = build_sfm_options(c);
        const SmithMultipliers t = smith_form_multipliers(a, rng, opts);
        const OuterProductAdjoint opa = outer_product_adjoint(a, t);
        const IntVec x = frac_solve(opa, b.col(0));
        if (c.format == "json") {
            json xs = json::array();
            for (const Int& v : x) xs.push_back(v.get_str());
            json j{{"s", opa.s().get_str()}, {"x", std::move(xs)}};
            std::cout << j.dump(2) << '\n';
        } else {
            std::cout << "s = " << opa.s().get_str() << '\n';
            for (size_t i = 0; i < x.size(); ++i)
                std::cout << x[i].get_str() << (i + 1 < x.size() ? ' ' : '\n');
        }
        return kExitOk;
    }

    const LiftingContext ctx = choose_lifting_modulus(a, rng);
    const IntMat x = solve_mod(ctx, b, *mod_digits);
    if (c.format == "json") {
        json j{{"p", ctx.p},
               {"e", ctx.e},
               {"X", ctx.X.get_str()},
               {"d", *mod_digits},
               {"x", matrix_to_json(x)}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "# X = " << ctx.p << '^' << ctx.e << " = " << ctx.X.get_str()
                  << ", precision X^" << *mod_digits << '\n';
        serialize_matrix(std::cout, x);
    }
    return kExitOk;
}

int cmd_linearize(const std::string& file, const std::string& mode, const CommonOpts& c) {
    const IntMat a = parse_matrix_file(file);
    Linearization lin;
    if (mode == "cols") {
        lin = linearize_columns(a);
    } else if (mode == "rows") {
        lin = linearize_rows(a);
    } else if (mode == "permut") {
        lin = linearize_permutation(a);
    } else {
        throw parse_error("linearize: unknown mode '" + mode + "'");
    }
    if (c.format == "json") {
        json e = json::array();
        for (int x : lin.ebar) e.push_back(x);
        json j{{"mode", mode}, {"d", lin.d}, {"e", std::move(e)}, {"D", matrix_to_json(lin.D)}};
        if (lin.mode == LinMode::permutation) {
            j["row_perm"] = lin.row_perm;
            j["col_perm"] = lin.col_perm;
        }
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "# mode=" << mode << " d=" << lin.d << '\n';
        serialize_matrix(std::cout, lin.D);
    }
    return kExitOk;
}

int cmd_opa(const std::string& file, const std::string& out, const CommonOpts& c) {
    const IntMat a = parse_matrix_file(file);
    const std::uint64_t seed = resolve_seed(c);
    Rng rng(seed);
    const SfmOptions opts = build_sfm_options(c);
    const SmithMultipliers t = smith_form_multipliers(a, rng, opts);
    const OuterProductAdjoint opa = outer_product_adjoint(a, t);
    const std::string text = opa_to_json(opa);
    if (out.empty()) {
        std::cout << text << '\n';
    } else {
        std::ofstream f(out);
        if (!f) throw parse_error("cannot open " + out + " for writing");
        f << text << '\n';
    }
    return kExitOk;
}

int cmd_hermite_trivial(const std::string& file, const CommonOpts& c) {
    const IntMat b = parse_matrix_file(file);
    const auto th = trivial_lower_hermite(b);
    if (!th) {
        std::cout << "NotTrivial\n";
        return kExitAlgorithmic;
    }
    const IntMat h = hermite_from_trivial(b.rows(), *th);
    if (c.format == "json") {
        json j{{"h1", th->h1.get_str()}, {"H", matrix_to_json(h)}};
        std::cout << j.dump(2) << '\n';
    } else {
        serialize_matrix(std::cout, h);
    }
    return kExitOk;
}

int cmd_verify(const std::string& afile, const std::string& sfile, const std::string& ufile,
               const std::string& vfile) {
    const IntMat a = parse_matrix_file(afile);
    const SmithForm s = parse_diag_file(sfile);
    const IntMat u = parse_matrix_file(ufile);
    const IntMat v = parse_matrix_file(vfile);
    const int n = a.rows();
    if (a.cols() != n || s.n() != n || u.rows() != n || u.cols() != n || v.rows() != n ||
        v.cols() != n)
        throw dimension_error("verify: shape mismatch");

    bool ok = true;
    if (!s.valid_chain()) {
        std::cout << "S divisibility chain: FAILED\n";
        ok = false;
    }
    MatBuf us(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) us.at(i, j) = u.at(i, j) * s.s(j);
    if (matmul(a, v) == us.freeze()) {
        std::cout << "A V = U S: ok\n";
    } else {
        std::cout << "A V = U S: FAILED\n";
        ok = false;
    }
    const Int dv = abs(det_exact(v));
    const Int du = abs(det_exact(u));
    std::cout << "|det V| = " << dv.get_str() << (dv == 1 ? ": ok\n" : ": FAILED\n");
    std::cout << "|det U| = " << du.get_str() << (du == 1 ? ": ok\n" : ": FAILED\n");
    if (dv != 1 || du != 1) ok = false;
    return ok ? kExitOk : kExitAlgorithmic;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Smith normal form with multipliers for nonsingular integer matrices"};
    app.require_subcommand(1);

    CommonOpts c;
    std::string afile, bfile, sfile, ufile, vfile;
    std::string prefix = "snf_out", replay_fixture, mode = "cols", opa_out;
    bool frac = false;
    std::optional<int> mod_digits;

    CLI::App* smith = app.add_subcommand("smith", "print the Smith form diagonal of A");
    smith->add_option("matrix", afile, "matrix file")->required();
    add_format_opt(smith, c);

    CLI::App* mult = app.add_subcommand(
        "multipliers", "compute S with unimodular U, V such that A V = U S; write them to files");
    mult->add_option("matrix", afile, "matrix file")->required();
    mult->add_option("--out-prefix", prefix, "prefix for the .S.txt/.V.txt/.U.txt output files");
    mult->add_option("--replay-fixture", replay_fixture,
                     "replay a frozen massager/perturbation pair (test only; available: s5)");
    add_seed_opts(mult, c);
    add_format_opt(mult, c);

    CLI::App* solve = app.add_subcommand("solve", "solve A x = b modularly or fractionally");
    solve->add_option("matrix", afile, "matrix file")->required();
    solve->add_option("rhs", bfile, "right-hand side file")->required();
    CLI::Option* frac_opt = solve->add_flag("--frac", frac, "print Rem(s A^{-1} b, s) and s");
    solve->add_option("--mod", mod_digits, "X-adic precision d; print Rem(A^{-1} b, X^d)")
        ->excludes(frac_opt)
        ->check(CLI::PositiveNumber);
    add_seed_opts(solve, c);
    add_format_opt(solve, c);

    CLI::App* lin = app.add_subcommand("linearize", "partially linearize a skewed matrix");
    lin->add_option("matrix", afile, "matrix file")->required();
    lin->add_option("--mode", mode, "cols | rows | permut")
        ->check(CLI::IsMember({"cols", "rows", "permut"}));
    add_format_opt(lin, c);

    CLI::App* opa = app.add_subcommand("opa", "compact outer-product form of Rem(s A^{-1}, s)");
    opa->add_option("matrix", afile, "matrix file")->required();
    opa->add_option("--out", opa_out, "write the JSON here instead of stdout");
    add_seed_opts(opa, c);

    CLI::App* ht = app.add_subcommand("hermite-trivial",
                                      "Hermite form via the massager shortcut; NotTrivial -> exit 1");
    ht->add_option("matrix", afile, "matrix file")->required();
    add_format_opt(ht, c);

    CLI::App* ver = app.add_subcommand("verify", "check A V = U S and unimodularity");
    ver->add_option("matrix", afile, "matrix file")->required();
    ver->add_option("smith", sfile, "Smith diagonal file (vector or diagonal matrix)")->required();
    ver->add_option("u", ufile, "U file")->required();
    ver->add_option("v", vfile, "V file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (smith->parsed()) return cmd_smith(afile, c);
        if (mult->parsed()) return cmd_multipliers(afile, prefix, replay_fixture, c);
        if (solve->parsed()) return cmd_solve(afile, bfile, frac, mod_digits, c);
        if (lin->parsed()) return cmd_linearize(afile, mode, c);
        if (opa->parsed()) return cmd_opa(afile, opa_out, c);
        if (ht->parsed()) return cmd_hermite_trivial(afile, c);
        if (ver->parsed()) return cmd_verify(afile, sfile, ufile, vfile);
    } catch (const singular_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSingular;
    } catch (const retries_exhausted& e) {
        std::cerr << "error: " << e.what() << " (not-trivial " << e.not_trivial_count
                  << ", singular " << e.fail_count << ")\n";
        return kExitAlgorithmic;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const dimension_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const precondition_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitAlgorithmic;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitAlgorithmic;
    }
    return kExitOk;
}
