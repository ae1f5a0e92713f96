#include "padlin/json_io.hpp"

namespace padlin::json_io {

namespace {

std::string to_str(const Int& v) { return v.get_str(); }
std::string to_str(const Rat& v) { return v.get_str(); }
Int int_from(const json& j) { return Int(j.get<std::string>()); }
Rat rat_from(const json& j) { return Rat(j.get<std::string>()); }

json vec_to_json(const std::vector<Int>& v) {
    json out = json::array();
    for (const Int& x : v) out.push_back(to_str(x));
    return out;
}
json vec_to_json(const std::vector<Rat>& v) {
    json out = json::array();
    for (const Rat& x : v) out.push_back(to_str(x));
    return out;
}
std::vector<Int> ints_from(const json& j) {
    std::vector<Int> out;
    for (const auto& e : j) out.push_back(int_from(e));
    return out;
}
std::vector<Rat> rats_from(const json& j) {
    std::vector<Rat> out;
    for (const auto& e : j) out.push_back(rat_from(e));
    return out;
}

json bare_system_to_json(const DiagLinSystem& sys) {
    json j;
    j["a"] = vec_to_json(sys.a);
    j["b"] = vec_to_json(sys.b);
    if (sys.const_a != 0) j["const_a"] = to_str(sys.const_a);
    if (sys.const_b != 0) j["const_b"] = to_str(sys.const_b);
    return j;
}

DiagLinSystem bare_system_from_json(const json& j) {
    DiagLinSystem sys;
    sys.a = ints_from(j.at("a"));
    sys.b = ints_from(j.at("b"));
    if (sys.a.size() != sys.b.size()) throw InvalidInput("a and b must have equal length");
    if (j.contains("const_a")) sys.const_a = int_from(j["const_a"]);
    if (j.contains("const_b")) sys.const_b = int_from(j["const_b"]);
    return sys;
}

json step_to_json(const TransformStep& st) {
    json j;
    j["new_size"] = st.new_size;
    j["scale_a"] = to_str(st.scale_a);
    j["scale_b"] = to_str(st.scale_b);
    if (!st.note.empty()) j["note"] = st.note;
    json acts = json::array();
    for (const auto& a : st.actions) {
        json e;
        if (a.kind == VarAction::Zero)
            e["zero"] = true;
        else if (a.kind == VarAction::Map) {
            e["to"] = a.target;
            e["mul"] = to_str(a.mult);
        } else
            e["freeze"] = to_str(a.value);
        acts.push_back(e);
    }
    j["map"] = acts;
    return j;
}

TransformStep step_from_json(const json& j) {
    TransformStep st;
    st.new_size = j.at("new_size").get<long>();
    st.scale_a = rat_from(j.at("scale_a"));
    st.scale_b = rat_from(j.at("scale_b"));
    if (j.contains("note")) st.note = j["note"].get<std::string>();
    for (const auto& e : j.at("map")) {
        VarAction a;
        if (e.contains("zero"))
            a.kind = VarAction::Zero;
        else if (e.contains("freeze")) {
            a.kind = VarAction::Freeze;
            a.value = rat_from(e["freeze"]);
        } else {
            a.kind = VarAction::Map;
            a.target = e.at("to").get<long>();
            a.mult = rat_from(e.at("mul"));
        }
        st.actions.push_back(a);
    }
    return st;
}

json witness_to_json(const hensel::HenselWitness& w) {
    json j;
    j["system"] = bare_system_to_json(w.system);
    j["x"] = vec_to_json(w.x);
    j["pivot"] = json::array({w.pivot_i, w.pivot_j});
    return j;
}

hensel::HenselWitness witness_from_json(const json& j, const PadicContext& ctx) {
    hensel::HenselWitness w;
    w.system = bare_system_from_json(j.at("system"));
    w.ctx = ctx;
    w.x = ints_from(j.at("x"));
    w.pivot_i = j.at("pivot")[0].get<long>();
    w.pivot_j = j.at("pivot")[1].get<long>();
    return w;
}

json root_witness_to_json(const hensel::PolyRootWitness& w) {
    json j;
    j["system"] = bare_system_to_json(w.system);
    json fr = json::array();
    for (auto& [i, v] : w.frozen) fr.push_back(json::array({i, to_str(v)}));
    j["frozen"] = fr;
    j["var"] = w.var_x;
    if (w.mirror) j["mirror"] = json::array({w.mirror->first, to_str(w.mirror->second)});
    j["poly"] = vec_to_json(w.poly);
    j["theta_scale"] = w.theta_scale;
    j["point"] = to_str(w.point);
    return j;
}

hensel::PolyRootWitness root_witness_from_json(const json& j, const PadicContext& ctx) {
    hensel::PolyRootWitness w;
    w.system = bare_system_from_json(j.at("system"));
    w.ctx = ctx;
    for (const auto& e : j.at("frozen")) w.frozen.push_back({e[0].get<long>(), int_from(e[1])});
    w.var_x = j.at("var").get<long>();
    if (j.contains("mirror")) w.mirror = {std::pair<long, Int>{j["mirror"][0].get<long>(), int_from(j["mirror"][1])}};
    w.poly = ints_from(j.at("poly"));
    w.theta_scale = j.at("theta_scale").get<long>();
    w.point = int_from(j.at("point"));
    return w;
}

json descent_to_json(const DescentTrace& t) {
    json j;
    j["system"] = bare_system_to_json(t.system);
    j["p"] = to_str(t.p);
    j["k"] = t.k;
    json lv = json::array();
    for (const auto& l : t.levels) {
        json e;
        e["level"] = l.level;
        e["block"] = l.block;
        e["unit_parts"] = vec_to_json(l.unit_parts);
        lv.push_back(e);
    }
    j["levels"] = lv;
    j["forced_linear_index"] = t.forced_linear_index;
    j["conclusion"] = t.conclusion;
    return j;
}

DescentTrace descent_from_json(const json& j) {
    DescentTrace t;
    t.system = bare_system_from_json(j.at("system"));
    t.p = int_from(j.at("p"));
    t.k = j.at("k").get<unsigned long>();
    for (const auto& e : j.at("levels")) {
        DescentLevel l;
        l.level = e.at("level").get<long>();
        l.block = e.at("block").get<std::vector<long>>();
        l.unit_parts = ints_from(e.at("unit_parts"));
        t.levels.push_back(l);
    }
    t.forced_linear_index = j.at("forced_linear_index").get<long>();
    t.conclusion = j.value("conclusion", "");
    return t;
}

} // namespace

json system_to_json(const DiagLinSystem& sys, const Int& p, unsigned long k) {
    json j = bare_system_to_json(sys);
    j["p"] = to_str(p);
    j["k"] = k;
    return j;
}

DiagLinSystem system_from_json(const json& j, Int* p, unsigned long* k) {
    if (p) *p = Int(j.at("p").get<std::string>());
    if (k) *k = j.at("k").get<unsigned long>();
    return bare_system_from_json(j);
}

json certificate_to_json(const Certificate& cert) {
    json j;
    switch (cert.kind) {
    case Certificate::ExactRational: j["kind"] = "exact_rational"; break;
    case Certificate::HenselWitness: j["kind"] = "hensel_witness"; break;
    case Certificate::InsolubilityDescent: j["kind"] = "insolubility_descent"; break;
    default: j["kind"] = "unresolved"; break;
    }
    j["p"] = to_str(cert.p);
    j["k"] = cert.k;
    j["input"] = bare_system_to_json(cert.input);
    if (cert.perturbation) {
        json pj;
        pj["exponent"] = cert.perturbation->exponent;
        pj["a_indices"] = cert.perturbation->a_indices;
        pj["b_indices"] = cert.perturbation->b_indices;
        j["perturbation"] = pj;
    }
    {
        json steps = json::array();
        for (const auto& st : cert.transcript.steps) steps.push_back(step_to_json(st));
        j["transcript"] = steps;
    }
    if (cert.exact) j["exact_solution"] = vec_to_json(*cert.exact);
    if (cert.pair_witness) j["witness"] = witness_to_json(*cert.pair_witness);
    if (cert.root_witness) j["root_witness"] = root_witness_to_json(*cert.root_witness);
    if (cert.raw_witness) j["raw_witness"] = witness_to_json(*cert.raw_witness);
    if (cert.descent) j["descent"] = descent_to_json(*cert.descent);
    if (cert.demo) {
        json d;
        d["M"] = cert.demo->M;
        d["x"] = vec_to_json(cert.demo->x);
        d["vp_a"] = cert.demo->vp_a >= kValInf ? json("inf") : json(cert.demo->vp_a);
        d["vp_b"] = cert.demo->vp_b >= kValInf ? json("inf") : json(cert.demo->vp_b);
        d["unit_index"] = cert.demo->unit_index;
        j["precision_demo"] = d;
    }
    if (!cert.engine.empty()) j["engine"] = cert.engine;
    if (!cert.branch.empty()) j["branch"] = cert.branch;
    if (!cert.detail.empty()) j["detail"] = cert.detail;
    return j;
}

Certificate certificate_from_json(const json& j) {
    Certificate cert;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "exact_rational")
        cert.kind = Certificate::ExactRational;
    else if (kind == "hensel_witness")
        cert.kind = Certificate::HenselWitness;
    else if (kind == "insolubility_descent")
        cert.kind = Certificate::InsolubilityDescent;
    else
        cert.kind = Certificate::Unresolved;
    cert.p = int_from(j.at("p"));
    cert.k = j.at("k").get<unsigned long>();
    cert.input = bare_system_from_json(j.at("input"));
    PadicContext ctx = make_context(cert.p, cert.k);
    if (j.contains("perturbation")) {
        normalize::Perturbation pert;
        pert.exponent = j["perturbation"].at("exponent").get<long>();
        pert.a_indices = j["perturbation"].at("a_indices").get<std::vector<long>>();
        pert.b_indices = j["perturbation"].at("b_indices").get<std::vector<long>>();
        cert.perturbation = pert;
    }
    cert.transcript.source = cert.input;
    if (cert.perturbation)
        cert.transcript.source = normalize::apply_perturbation(cert.input, cert.p, *cert.perturbation);
    if (j.contains("transcript"))
        for (const auto& e : j["transcript"]) cert.transcript.append(step_from_json(e));
    if (j.contains("exact_solution")) cert.exact = rats_from(j["exact_solution"]);
    if (j.contains("witness")) cert.pair_witness = witness_from_json(j["witness"], ctx);
    if (j.contains("root_witness")) cert.root_witness = root_witness_from_json(j["root_witness"], ctx);
    if (j.contains("raw_witness")) cert.raw_witness = witness_from_json(j["raw_witness"], ctx);
    if (j.contains("descent")) cert.descent = descent_from_json(j["descent"]);
    if (j.contains("engine")) cert.engine = j["engine"].get<std::string>();
    if (j.contains("branch")) cert.branch = j["branch"].get<std::string>();
    if (j.contains("detail")) cert.detail = j["detail"].get<std::string>();
    return cert;
}

json oracle_report_to_json(const oracle::OracleReport& rep) {
    json j;
    j["found"] = rep.found;
    j["exhausted"] = rep.exhausted;
    j["states"] = rep.states;
    if (rep.witness) j["witness"] = vec_to_json(*rep.witness);
    if (rep.nonsingular_pivot) j["pivot"] = json::array({rep.nonsingular_pivot->first, rep.nonsingular_pivot->second});
    return j;
}

} // namespace padlin::json_io
