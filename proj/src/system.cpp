#include "padlin/system.hpp"

namespace padlin {

DiagLinSystem make_system(std::vector<Int> a, std::vector<Int> b) {
    if (a.size() != b.size()) throw InvalidInput("coefficient vectors must have equal length");
    if (a.size() < 2) throw InvalidInput("need at least two variables");
    DiagLinSystem sys;
    sys.a = std::move(a);
    sys.b = std::move(b);
    return sys;
}

Int eval_a(const DiagLinSystem& sys, const std::vector<Int>& x, unsigned long k) {
    if ((long)x.size() != sys.s()) throw InvalidInput("eval_a: dimension mismatch");
    Int acc = sys.const_a;
    for (long i = 0; i < sys.s(); ++i) acc += sys.a[i] * pow_ui(x[i], k);
    return acc;
}

Int eval_b(const DiagLinSystem& sys, const std::vector<Int>& x) {
    if ((long)x.size() != sys.s()) throw InvalidInput("eval_b: dimension mismatch");
    Int acc = sys.const_b;
    for (long i = 0; i < sys.s(); ++i) acc += sys.b[i] * x[i];
    return acc;
}

Rat eval_a_rat(const DiagLinSystem& sys, const std::vector<Rat>& x, unsigned long k) {
    if ((long)x.size() != sys.s()) throw InvalidInput("eval_a: dimension mismatch");
    Rat acc(sys.const_a);
    for (long i = 0; i < sys.s(); ++i) acc += Rat(sys.a[i]) * pow_rat_ui(x[i], k);
    return acc;
}

Rat eval_b_rat(const DiagLinSystem& sys, const std::vector<Rat>& x) {
    if ((long)x.size() != sys.s()) throw InvalidInput("eval_b: dimension mismatch");
    Rat acc(sys.const_b);
    for (long i = 0; i < sys.s(); ++i) acc += Rat(sys.b[i]) * x[i];
    return acc;
}

SystemStats stats(const DiagLinSystem& sys, const PadicContext& ctx) {
    SystemStats st;
    long s = sys.s();
    st.nu.resize(s);
    st.mu.resize(s);
    st.levels.resize(s);
    st.low_flags.resize(s);
    st.upsilon.assign(ctx.k, 0);
    bool type_a = true;
    for (long i = 0; i < s; ++i) {
        st.nu[i] = vp(sys.a[i], ctx.p);
        st.mu[i] = vp(sys.b[i], ctx.p);
        st.levels[i] = std::min(st.mu[i], st.nu[i]);
        st.low_flags[i] = st.mu[i] < st.nu[i];
        if (st.nu[i] < kValInf) st.upsilon[st.nu[i] % (long)ctx.k] += 1;
        if (st.nu[i] != 0 && st.mu[i] == 0) type_a = false;
    }
    st.type = type_a ? SystemType::A : SystemType::B;
    return st;
}

} // namespace padlin
