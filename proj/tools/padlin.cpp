#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "padlin/driver.hpp"
#include "padlin/json_io.hpp"
#include "padlin/normalize.hpp"

using namespace padlin;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitUnresolved = 2;
constexpr int kExitInvalid = 3;
constexpr int kExitBudget = 4;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    json j;
    in >> j;
    return j;
}

unsigned long env_budget(unsigned long fallback) {
    if (const char* e = std::getenv("PADIC_WITNESS_BUDGET")) {
        char* end = nullptr;
        unsigned long v = std::strtoul(e, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
    }
    return fallback;
}

int cmd_solve(const std::string& input, long precision, unsigned long budget, const std::string& engine) {
    Int p;
    unsigned long k = 0;
    DiagLinSystem sys = json_io::system_from_json(load_json(input), &p, &k);
    driver::SolveOptions opts;
    opts.precision = precision;
    opts.budget = env_budget(budget);
    opts.engine = engine;
    Certificate cert = driver::solve(sys, p, k, opts);
    std::cout << json_io::certificate_to_json(cert).dump(2) << "\n";
    if (cert.kind == Certificate::Unresolved) {
        std::cerr << "unresolved: " << cert.detail << "\n";
        return kExitUnresolved;
    }
    auto v = driver::verify(cert, sys, std::min(precision, 10L));
    std::cerr << "certificate: " << (cert.kind == Certificate::ExactRational ? "exact rational" : "Hensel witness")
              << " via " << cert.engine << "/" << cert.branch << "; verified: " << (v.ok ? "yes" : "NO") << "\n";
    return v.ok ? kExitOk : kExitNegative;
}

int cmd_verify(const std::string& cert_path, const std::string& input_path) {
    Int p;
    unsigned long k = 0;
    DiagLinSystem sys = json_io::system_from_json(load_json(input_path), &p, &k);
    Certificate cert = json_io::certificate_from_json(load_json(cert_path));
    auto v = driver::verify(cert, sys);
    json out;
    out["verified"] = v.ok;
    if (!v.ok) out["failure"] = v.failure;
    std::cout << out.dump(2) << "\n";
    std::cerr << (v.ok ? "verified" : "NOT verified: " + v.failure) << "\n";
    return v.ok ? kExitOk : kExitNegative;
}

int cmd_normalize(const std::string& input) {
    Int p;
    unsigned long k = 0;
    DiagLinSystem sys = json_io::system_from_json(load_json(input), &p, &k);
    PadicContext ctx = make_context(p, k);
    auto pre = normalize::precondition(sys, ctx);
    auto cond = normalize::condition(pre.system, ctx);
    json out;
    out["conditioned"] = json_io::system_to_json(cond.system, p, k);
    out["shift"] = cond.shift;
    out["upsilon"] = cond.upsilon_after;
    if (pre.perturbation) out["perturbation_exponent"] = pre.perturbation->exponent;
    std::cout << out.dump(2) << "\n";
    std::cerr << "conditioned with shift " << cond.shift << "\n";
    return kExitOk;
}

int cmd_oracle(const std::string& input, long modulus_exp, unsigned long budget) {
    Int p;
    unsigned long k = 0;
    DiagLinSystem sys = json_io::system_from_json(load_json(input), &p, &k);
    PadicContext ctx = make_context(p, k);
    oracle::CongruenceQuery q;
    q.sys = sys;
    q.ctx = ctx;
    q.modulus_exponent = modulus_exp > 0 ? modulus_exp : (ctx.tau ? ctx.gamma : 1);
    q.budget = env_budget(budget);
    auto rep = oracle::find_nonsingular(q);
    std::cout << json_io::oracle_report_to_json(rep).dump(2) << "\n";
    std::cerr << (rep.found ? "non-singular solution found" : rep.exhausted ? "exhausted: none" : "budget hit")
              << " after " << rep.states << " states\n";
    if (rep.found) return kExitOk;
    return rep.exhausted ? kExitNegative : kExitBudget;
}

int cmd_gamma_star(unsigned long k, const std::string& p_str, unsigned long l, unsigned long budget) {
    Int p(p_str);
    auto rep = oracle::gamma_star_bruteforce(k, p, l, env_budget(budget));
    json out;
    out["gamma_star"] = rep.value;
    out["exhausted"] = rep.exhausted;
    if (!rep.hardest_tuple.empty()) {
        json t = json::array();
        for (const Int& c : rep.hardest_tuple) t.push_back(c.get_str());
        out["hardest_tuple_below"] = t;
    }
    std::cout << out.dump(2) << "\n";
    std::cerr << "gamma*(" << k << ", " << p_str << "^" << l << ") "
              << (rep.exhausted ? "= " : ">= ") << rep.value << "\n";
    return rep.exhausted ? kExitOk : kExitBudget;
}

int cmd_counterexample(const std::string& p_str) {
    Int p(p_str);
    Certificate cert = driver::verify_counterexample(p);
    std::cout << json_io::certificate_to_json(cert).dump(2) << "\n";
    std::cerr << "descent verified; solver reported no solution\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact p-adic solubility for one diagonal form plus one linear form"};
    app.require_subcommand(1);

    std::string input, cert_path, engine = "auto", p_str;
    long precision = 10, modulus_exp = 0;
    unsigned long budget = 10000000, kk = 0, ll = 1;

    auto* solve = app.add_subcommand("solve", "solve a system and emit a certificate");
    solve->add_option("input", input)->required();
    solve->add_option("--precision", precision);
    solve->add_option("--budget", budget);
    solve->add_option("--engine", engine)->check(CLI::IsMember({"auto", "contract", "pm1", "ppm1", "pow2"}));

    auto* verify = app.add_subcommand("verify", "verify a certificate against an input");
    verify->add_option("certificate", cert_path)->required();
    verify->add_option("input", input)->required();

    auto* normalize_cmd = app.add_subcommand("normalize", "precondition and condition a system");
    normalize_cmd->add_option("input", input)->required();

    auto* oracle_cmd = app.add_subcommand("oracle", "search for a non-singular congruence solution");
    oracle_cmd->add_option("input", input)->required();
    oracle_cmd->add_option("--modulus-exp", modulus_exp);
    oracle_cmd->add_option("--budget", budget);

    auto* gs = app.add_subcommand("gamma-star", "brute-force the unit-coefficient congruence invariant");
    gs->add_option("k", kk)->required();
    gs->add_option("p", p_str)->required();
    gs->add_option("l", ll)->required();
    gs->add_option("--budget", budget);

    auto* ce = app.add_subcommand("counterexample", "verified sharpness example for k = p-1");
    ce->add_option("p", p_str)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(input, precision, budget, engine);
        if (verify->parsed()) return cmd_verify(cert_path, input);
        if (normalize_cmd->parsed()) return cmd_normalize(input);
        if (oracle_cmd->parsed()) return cmd_oracle(input, modulus_exp, budget);
        if (gs->parsed()) return cmd_gamma_star(kk, p_str, ll, budget);
        if (ce->parsed()) return cmd_counterexample(p_str);
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return kExitBudget;
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}
