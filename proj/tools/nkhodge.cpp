// nkhodge: exact nearly Kahler identity checks on Lie algebra models.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nkhodge/identity_suite.hpp"

using nkh::LieAlgebraModel;
using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";

enum Exit { ok = 0, invalid = 1, usage = 2, inapplicable = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

LieAlgebraModel load(const std::string& ref) {
    const std::string prefix = "builtin:";
    if (ref.rfind(prefix, 0) == 0) {
        try {
            return nkh::builtin_model(ref.substr(prefix.size()));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    std::ifstream in(ref);
    if (!in) throw UsageError("cannot read " + ref);
    std::stringstream ss;
    ss << in.rdbuf();
    return nkh::parse_model(ss.str());
}

double digits12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::stod(buf);
}

std::string fmt12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

ojson header(const LieAlgebraModel& m) {
    ojson j;
    j["model"] = m.name;
    j["model_hash"] = nkh::model_hash(m);
    j["version"] = kVersion;
    return j;
}

ojson flags_json(const nkh::ExpectedFlags& f) {
    return {{"nearly_kahler", f.nearly_kahler}, {"strict", f.strict}, {"kahler", f.kahler}};
}

// Prints the validation failures; true if the model is valid.
bool validated(const LieAlgebraModel& m, nkh::ValidationReport& rep) {
    rep = nkh::validate_model(m);
    return rep.all_passed();
}

void print_json(const ojson& j) { std::cout << j.dump(2) << "\n"; }

int cmd_validate(const std::string& ref, const std::string& format) {
    LieAlgebraModel m;
    try {
        m = load(ref);
    } catch (const nkh::ModelParseError& e) {
        if (format == "json") {
            print_json({{"model", ref}, {"version", kVersion}, {"valid", false}, {"error", e.what()}});
        } else {
            std::cout << "invalid: " << e.what() << "\n";
        }
        return invalid;
    }
    nkh::ValidationReport rep;
    bool valid = validated(m, rep);
    bool stable = false;
    if (valid) {
        std::string text = nkh::emit_model(m);
        stable = nkh::emit_model(nkh::parse_model(text)) == text;
    }
    if (format == "json") {
        ojson j = header(m);
        j["valid"] = valid && stable;
        ojson entries = ojson::array();
        for (const auto& e : rep.entries) {
            ojson x = {{"name", e.name}, {"passed", e.passed}};
            if (!e.passed) x["witness"] = e.witness;
            entries.push_back(x);
        }
        j["checks"] = entries;
        j["round_trip"] = stable;
        print_json(j);
    } else {
        std::cout << m.name << " " << nkh::model_hash(m) << "\n";
        for (const auto& e : rep.entries)
            std::cout << "  " << (e.passed ? "ok   " : "FAIL ") << e.name << (e.passed ? "" : "  " + e.witness) << "\n";
        if (valid) std::cout << "  " << (stable ? "ok   " : "FAIL ") << "round_trip\n";
        std::cout << (valid && stable ? "valid" : "invalid") << "\n";
    }
    return valid && stable ? ok : invalid;
}

std::vector<std::string> split_ids(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string t; std::getline(ss, t, ',');)
        if (!t.empty()) out.push_back(t);
    return out;
}

ojson hodge_json(const nkh::HodgeReport& h) {
    ojson j;
    j["h"] = h.h;
    j["betti"] = h.betti;
    j["sum_rule"] = h.sum_rule;
    j["conjugate_symmetric"] = h.conjugate_symmetric;
    j["poincare"] = h.poincare;
    if (h.nk6_pattern) j["nk6_pattern"] = *h.nk6_pattern;
    return j;
}

void print_hodge_text(const nkh::HodgeReport& h) {
    std::cout << "h^{p,q} (rows p, columns q)\n";
    for (int p = 0; p <= h.n; ++p) {
        std::cout << "  ";
        for (int q = 0; q <= h.n; ++q) std::cout << (q ? " " : "") << h.h[p][q];
        std::cout << "\n";
    }
    std::cout << "betti";
    for (int b : h.betti) std::cout << " " << b;
    std::cout << "\n";
    for (std::size_t k = 0; k < h.betti.size(); ++k) {
        int s = 0;
        for (int p = 0; p <= h.n; ++p) {
            int q = static_cast<int>(k) - p;
            if (q >= 0 && q <= h.n) s += h.h[p][q];
        }
        std::cout << "  b^" << k << " = " << h.betti[k] << ", sum h^{p,q} = " << s << (s == h.betti[k] ? "" : "  MISMATCH")
                  << "\n";
    }
    std::cout << "sum rule " << (h.sum_rule ? "holds" : "FAILS") << "; h^{p,q} = h^{q,p} "
              << (h.conjugate_symmetric ? "holds" : "FAILS") << "; h^{p,q} = h^{n-p,n-q} "
              << (h.poincare ? "holds" : "FAILS") << "\n";
    if (h.nk6_pattern) std::cout << "strict NK6 vanishing pattern " << (*h.nk6_pattern ? "holds" : "FAILS") << "\n";
}

bool hodge_ok(const nkh::HodgeReport& h) {
    return h.sum_rule && h.conjugate_symmetric && h.poincare && h.nk6_pattern.value_or(true);
}

int cmd_suite(const std::string& ref, const std::string& checks, const std::string& format, bool deep,
              const std::string& xfail, int threads) {
    LieAlgebraModel m = load(ref);
    nkh::ValidationReport vr;
    if (!validated(m, vr)) {
        const auto* f = vr.first_failure();
        std::cerr << "model invalid: " << f->name << ": " << f->witness << "\n";
        return invalid;
    }
    nkh::SuiteOptions opts;
    opts.deep = deep;
    opts.threads = threads;
    if (!checks.empty()) {
        std::vector<std::string> ids = split_ids(checks), unknown;
        for (const auto& id : ids)
            if (!nkh::is_check_id(id)) unknown.push_back(id);
        if (!unknown.empty()) {
            std::cerr << "unknown check id:";
            for (const auto& u : unknown) std::cerr << " " << u;
            std::cerr << "\nknown:";
            for (const auto& c : nkh::check_catalogue()) std::cerr << " " << c.id;
            std::cerr << "\n";
            return usage;
        }
        opts.checks = ids;
    }
    if (!xfail.empty()) {
        std::set<std::string> ids;
        for (const auto& id : split_ids(xfail)) {
            if (!nkh::is_check_id(id)) {
                std::cerr << "unknown check id: " << id << "\n";
                return usage;
            }
            ids.insert(id);
        }
        opts.expected_failures = ids;
    }
    auto t0 = std::chrono::steady_clock::now();
    nkh::ModelContext ctx(m);
    nkh::Report rep = nkh::run_suite(ctx, opts);
    double total = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = rep.verdict();
    if (format == "json") {
        ojson j = header(m);
        ojson arr = ojson::array();
        for (const auto& c : rep.checks) {
            ojson x;
            x["id"] = c.id;
            x["status"] = nkh::status_name(c.status);
            x["expected"] = nkh::expect_name(c.expected);
            x["exact_zero"] = c.exact_zero;
            x["residual_approx"] = digits12(c.residual);
            if (c.witness) x["witness"] = *c.witness;
            if (c.status == nkh::Status::skip) x["skip_reason"] = c.skip_reason;
            x["ms"] = digits12(c.ms);
            arr.push_back(x);
        }
        j["checks"] = arr;
        j["flags"] = {{"expected", flags_json(rep.expected_flags)}, {"computed", flags_json(rep.computed_flags)}};
        j["verdict"] = pass ? "pass" : "fail";
        j["total_ms"] = digits12(total);
        print_json(j);
    } else {
        std::cout << m.name << " " << nkh::model_hash(m) << " (nkhodge " << kVersion << ")\n";
        for (const auto& c : rep.checks) {
            std::cout << "  " << c.id << " " << nkh::status_name(c.status);
            if (c.status == nkh::Status::skip) {
                std::cout << " (" << c.skip_reason << ")";
            } else {
                std::cout << " expected " << nkh::expect_name(c.expected) << (c.matches() ? "" : " MISMATCH")
                          << " residual " << fmt12(c.residual);
            }
            std::cout << " " << fmt12(c.ms) << " ms";
            if (c.witness) std::cout << "\n      witness: " << *c.witness;
            std::cout << "\n";
        }
        if (!rep.flags_consistent()) std::cout << "  declared flags differ from computed flags\n";
        std::cout << "verdict " << (pass ? "pass" : "fail") << " (" << fmt12(total) << " ms)\n";
    }
    return pass ? ok : invalid;
}

int cmd_hodge(const std::string& ref, const std::string& format) {
    LieAlgebraModel m = load(ref);
    nkh::ValidationReport vr;
    if (!validated(m, vr)) {
        const auto* f = vr.first_failure();
        std::cerr << "model invalid: " << f->name << ": " << f->witness << "\n";
        return invalid;
    }
    auto t0 = std::chrono::steady_clock::now();
    nkh::ModelContext ctx(m);
    nkh::HodgeReport h;
    try {
        h = nkh::hodge_numbers(ctx);
    } catch (const nkh::NotNearlyKahler& e) {
        std::cerr << e.what() << "\n";
        return inapplicable;
    }
    double total = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (format == "json") {
        ojson j = header(m);
        j["hodge"] = hodge_json(h);
        j["total_ms"] = digits12(total);
        print_json(j);
    } else {
        std::cout << m.name << " " << nkh::model_hash(m) << "\n";
        print_hodge_text(h);
    }
    return hodge_ok(h) ? ok : invalid;
}

int cmd_order(const std::string& ref, const std::string& op, int max_r) {
    LieAlgebraModel m = load(ref);
    nkh::ValidationReport vr;
    if (!validated(m, vr)) {
        const auto* f = vr.first_failure();
        std::cerr << "model invalid: " << f->name << ": " << f->witness << "\n";
        return invalid;
    }
    if (max_r < 0) throw UsageError("--max must be non-negative");
    nkh::FormSpace s(m);
    nkh::GradedOperator p;
    if (op == "d") {
        p = nkh::exterior_d(s, nkh::Coframe::pq);
    } else if (op == "dstar") {
        p = s.adjoint(nkh::exterior_d(s, nkh::Coframe::pq));
    } else if (op == "lambda_omega") {
        p = nkh::lefschetz_triple(s, nkh::Coframe::pq).Lambda;
    } else {
        throw UsageError("unknown operator " + op);
    }
    for (int r = 0; r <= max_r; ++r) {
        if (nkh::algebraic_order_at_most(s, p, r)) {
            std::cout << op << " has algebraic order " << r << "\n";
            return ok;
        }
    }
    std::cout << op << " has algebraic order > " << max_r << "\n";
    return ok;
}

std::string matrix_summary(const nkh::DenseMatrix& a, bool identity_ok) {
    bool is_id = true, is_zero = true;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            if (!(a(i, j) == nkh::Scalar(i == j ? 1 : 0))) is_id = false;
            if (!a(i, j).is_zero()) is_zero = false;
        }
    if (identity_ok && is_id) return "Id";
    if (is_zero) return "0";
    std::string out;
    for (int i = 0; i < a.rows(); ++i) {
        out += "\n    ";
        for (int j = 0; j < a.cols(); ++j) out += (j ? " " : "") + a(i, j).str();
    }
    return out;
}

int cmd_models(const std::vector<std::string>& args, const std::string& emit) {
    if (args.empty()) throw UsageError("models: expected 'list' or 'show <name>'");
    if (args[0] == "list") {
        for (const auto& name : nkh::builtin_names()) {
            LieAlgebraModel m = nkh::builtin_model(name);
            std::cout << name << "  dim " << m.dimension << "  d " << m.extension_d << "  nearly_kahler "
                      << m.expected.nearly_kahler << " strict " << m.expected.strict << " kahler " << m.expected.kahler
                      << "\n";
        }
        return ok;
    }
    if (args[0] != "show" || args.size() != 2) throw UsageError("models: expected 'list' or 'show <name>'");
    LieAlgebraModel m;
    try {
        m = nkh::builtin_model(args[1]);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (!emit.empty()) {
        std::ofstream out(emit);
        if (!out) throw UsageError("cannot write " + emit);
        out << nkh::emit_model(m);
    }
    int nonzero = 0;
    for (const auto& c : m.structure)
        if (!c.is_zero()) ++nonzero;
    std::cout << m.name << "  dim " << m.dimension << "  extension_d " << m.extension_d << "\n";
    if (nonzero == 0) {
        std::cout << "  c = 0\n";
    } else {
        std::cout << "  structure constants:";
        for (int i = 0; i < m.dimension; ++i)
            for (int j = i + 1; j < m.dimension; ++j)
                for (int k = 0; k < m.dimension; ++k)
                    if (!m.c(k, i, j).is_zero())
                        std::cout << " c^" << k + 1 << "_" << i + 1 << "," << j + 1 << "=" << m.c(k, i, j).str();
        std::cout << "\n";
    }
    std::cout << "  g = " << matrix_summary(m.metric, true) << "\n";
    std::cout << "  J = " << matrix_summary(m.complex_structure, false) << "\n";
    std::cout << "  expected nearly_kahler " << m.expected.nearly_kahler << " strict " << m.expected.strict
              << " kahler " << m.expected.kahler << "\n";
    if (!emit.empty()) std::cout << "  written to " << emit << "\n";
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact nearly Kahler identities on Lie algebra models"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string model, format = "text", checks, xfail, op, emit;
    bool deep = false;
    int max_r = 2, threads = 0;
    std::vector<std::string> model_args;

    auto* validate = app.add_subcommand("validate", "check model invariants");
    validate->add_option("model", model, "model file or builtin:<name>")->required();
    validate->add_option("--report", format)->check(CLI::IsMember({"json", "text"}));

    auto* suite = app.add_subcommand("suite", "run the identity catalogue");
    suite->add_option("model", model, "model file or builtin:<name>")->required();
    suite->add_option("--checks", checks, "comma-separated check ids");
    suite->add_option("--report", format)->check(CLI::IsMember({"json", "text"}));
    suite->add_flag("--deep", deep, "full catalogue on dimension >= 12 models");
    suite->add_option("--expect-fail", xfail, "comma-separated ids declared to fail");
    suite->add_option("--threads", threads, "worker threads (0: all cores)");

    auto* hodge = app.add_subcommand("hodge", "Hodge numbers of harmonic forms");
    hodge->add_option("model", model, "model file or builtin:<name>")->required();
    hodge->add_option("--report", format)->check(CLI::IsMember({"json", "text"}));

    auto* order = app.add_subcommand("order", "algebraic order of an operator");
    order->add_option("model", model, "model file or builtin:<name>")->required();
    order->add_option("--op", op)->required()->check(CLI::IsMember({"d", "dstar", "lambda_omega"}));
    order->add_option("--max", max_r)->required();

    auto* models = app.add_subcommand("models", "built-in models");
    models->add_option("args", model_args, "list | show <name>");
    models->add_option("--emit", emit, "write the canonical model file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        if (*validate) return cmd_validate(model, format);
        if (*suite) return cmd_suite(model, checks, format, deep, xfail, threads);
        if (*hodge) return cmd_hodge(model, format);
        if (*order) return cmd_order(model, op, max_r);
        if (*models) return cmd_models(model_args, emit);
    } catch (const UsageError& e) {
        std::cerr << e.what() << "\n";
        return usage;
    } catch (const nkh::ModelParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return invalid;
    }
    return usage;
}
