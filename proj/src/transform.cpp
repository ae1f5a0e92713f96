#include "padlin/transform.hpp"

#include <set>

namespace padlin {

namespace {

Int rat_to_int(const Rat& r, const char* what) {
    if (r.get_den() != 1) throw InvalidTransform(std::string("non-integer coefficient after ") + what);
    return r.get_num();
}

} // namespace

DiagLinSystem apply_transform(const DiagLinSystem& sys, const TransformStep& step, unsigned long k) {
    if ((long)step.actions.size() != sys.s()) throw InvalidTransform("action count mismatch");
    if (step.new_size < 2) throw InvalidTransform("derived system needs at least two variables");
    if (step.scale_a == 0 || step.scale_b == 0) throw InvalidTransform("zero equation scale");

    std::vector<Rat> a(step.new_size, Rat(0)), b(step.new_size, Rat(0));
    Rat ca(sys.const_a), cb(sys.const_b);
    for (long i = 0; i < sys.s(); ++i) {
        const VarAction& act = step.actions[i];
        switch (act.kind) {
        case VarAction::Zero:
            break;
        case VarAction::Map: {
            if (act.mult == 0) throw InvalidTransform("zero multiplier");
            if (act.target < 0 || act.target >= step.new_size) throw InvalidTransform("bad target index");
            a[act.target] += Rat(sys.a[i]) * pow_rat_ui(act.mult, k);
            b[act.target] += Rat(sys.b[i]) * act.mult;
            break;
        }
        case VarAction::Freeze:
            ca += Rat(sys.a[i]) * pow_rat_ui(act.value, k);
            cb += Rat(sys.b[i]) * act.value;
            break;
        }
    }

    DiagLinSystem out;
    out.a.resize(step.new_size);
    out.b.resize(step.new_size);
    for (long j = 0; j < step.new_size; ++j) {
        out.a[j] = rat_to_int(a[j] * step.scale_a, "degree-equation scaling");
        out.b[j] = rat_to_int(b[j] * step.scale_b, "linear-equation scaling");
    }
    out.const_a = rat_to_int(ca * step.scale_a, "degree-equation scaling");
    out.const_b = rat_to_int(cb * step.scale_b, "linear-equation scaling");
    return out;
}

std::vector<Rat> pull_back_step(const TransformStep& step, const std::vector<Rat>& y) {
    if ((long)y.size() != step.new_size) throw InvalidTransform("pull_back: dimension mismatch");
    std::vector<Rat> x(step.actions.size(), Rat(0));
    for (size_t i = 0; i < step.actions.size(); ++i) {
        const VarAction& act = step.actions[i];
        if (act.kind == VarAction::Map) x[i] = act.mult * y[act.target];
        else if (act.kind == VarAction::Freeze) x[i] = act.value;
    }
    return x;
}

DiagLinSystem Transcript::replay(unsigned long k) const {
    DiagLinSystem cur = source;
    for (const auto& st : steps) cur = apply_transform(cur, st, k);
    return cur;
}

std::vector<Rat> Transcript::pull_back(std::vector<Rat> y) const {
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) y = pull_back_step(*it, y);
    return y;
}

TransformStep identity_step(long s) {
    TransformStep st;
    st.new_size = s;
    st.actions.resize(s);
    for (long i = 0; i < s; ++i) st.actions[i] = {VarAction::Map, i, Rat(1), Rat(0)};
    st.note = "identity";
    return st;
}

TransformStep permutation_step(const std::vector<long>& new_index_of_old, const char* note) {
    TransformStep st;
    long s = (long)new_index_of_old.size();
    st.new_size = s;
    st.actions.resize(s);
    std::set<long> seen;
    for (long i = 0; i < s; ++i) {
        long j = new_index_of_old[i];
        if (j < 0 || j >= s || !seen.insert(j).second) throw InvalidTransform("not a permutation");
        st.actions[i] = {VarAction::Map, j, Rat(1), Rat(0)};
    }
    st.note = note;
    return st;
}

TransformStep zero_except_step(long s, const std::vector<long>& keep, const char* note) {
    TransformStep st;
    st.new_size = s;
    st.actions.resize(s); // default Zero
    for (long i : keep) {
        if (i < 0 || i >= s) throw InvalidTransform("zero_except: bad index");
        st.actions[i] = {VarAction::Map, i, Rat(1), Rat(0)};
    }
    st.note = note;
    return st;
}

} // namespace padlin
