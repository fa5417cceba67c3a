#include "ebwlan/access_delay.hpp"

#include <cmath>
#include <limits>

namespace ebwlan {

BackoffConstants backoff_constants(const SlotProbabilities& probs_b, const SlotTimes& st) {
    if (probs_b.view != SlotView::BackoffView)
        throw std::invalid_argument("backoff_constants expects backoff-view probabilities");
    BackoffConstants c;
    auto accumulate = [&](double t, double p) {
        c.a1 += t * p;
        c.a2 += t * t * p;
        c.a3 += t * t * t * p;
    };
    accumulate(st.t_idle, probs_b.p_idle);
    accumulate(st.t_coll, probs_b.p_coll);
    accumulate(st.t_succ, probs_b.p_succ);
    return c;
}

double countdown_slot_transform(double s, const SlotProbabilities& probs_b, const SlotTimes& st) {
    if (probs_b.view != SlotView::BackoffView)
        throw std::invalid_argument("countdown_slot_transform expects backoff-view probabilities");
    return std::exp(-s * st.t_idle) * probs_b.p_idle
         + std::exp(-s * st.t_coll) * probs_b.p_coll
         + std::exp(-s * st.t_succ) * probs_b.p_succ;
}

std::complex<double> countdown_slot_transform(std::complex<double> s,
                                              const SlotProbabilities& probs_b,
                                              const SlotTimes& st) {
    if (probs_b.view != SlotView::BackoffView)
        throw std::invalid_argument("countdown_slot_transform expects backoff-view probabilities");
    return std::exp(-s * st.t_idle) * probs_b.p_idle
         + std::exp(-s * st.t_coll) * probs_b.p_coll
         + std::exp(-s * st.t_succ) * probs_b.p_succ;
}

namespace {

double stage_window(int stage, const NetworkConfig& cfg) {
    if (stage < 1) throw std::invalid_argument("backoff stage must be >= 1");
    return std::pow(cfg.backoff_factor, stage - 1) * cfg.min_window;
}

} // namespace

double backoff_window_transform(int stage, double z, const NetworkConfig& cfg) {
    if (!(z > 0.0)) throw std::invalid_argument("z must be positive");
    const double w = stage_window(stage, cfg);
    if (z == 1.0) return 1.0;
    const double lz = std::log1p(z - 1.0);
    const double e = w * lz;
    if (e > 700.0) return std::numeric_limits<double>::infinity(); // z > 1 blow-up
    return std::expm1(e) / (w * (z - 1.0));
}

CentralMoments backoff_period_moments(int stage, const BackoffConstants& c, const NetworkConfig& cfg) {
    const double w = stage_window(stage, cfg);
    const double a1 = c.a1, a2 = c.a2, a3 = c.a3;
    CentralMoments m;
    m.mean = a1 * (w - 1.0) / 2.0;
    m.variance = a1 * a1 * (w - 1.0) * (w - 5.0) / 12.0 + a2 * (w - 1.0) / 2.0;
    m.third_central = a1 * a1 * a1 * (-(w * w) + 4.0 * w - 3.0) / 4.0
                    + a1 * a2 * (w * w - 6.0 * w + 5.0) / 4.0
                    + a3 * (w - 1.0) / 2.0;
    return m;
}

double retry_count_prob(int j, double p_c) {
    if (j < 1) throw std::invalid_argument("attempt index j must be >= 1");
    if (!(p_c >= 0.0 && p_c < 1.0))
        throw std::invalid_argument("p_c must lie in [0,1)");
    return std::pow(p_c, j - 1) * (1.0 - p_c);
}

namespace {

// Moments of X_ne are expectations of polynomials in (j, R = r^j) over the
// geometric retry count. A dense 4x4 coefficient grid is enough: the cubic
// of the conditional mean reaches j^3 R^3 and no further.
struct Poly {
    double c[4][4] = {};
};

Poly operator*(const Poly& a, const Poly& b) {
    Poly out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (a.c[i][j] == 0.0) continue;
            for (int k = 0; i + k < 4; ++k)
                for (int l = 0; j + l < 4; ++l)
                    if (b.c[k][l] != 0.0) out.c[i + k][j + l] += a.c[i][j] * b.c[k][l];
        }
    return out;
}

Poly& operator+=(Poly& a, const Poly& b) {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a.c[i][j] += b.c[i][j];
    return a;
}

Poly scaled(const Poly& a, double s) {
    Poly out = a;
    for (auto& row : out.c)
        for (auto& v : row) v *= s;
    return out;
}

// sum_{j>=1} j^a x^j, |x| < 1
double geometric_sum(int a, double x) {
    const double d = 1.0 - x;
    switch (a) {
    case 0: return x / d;
    case 1: return x / (d * d);
    case 2: return x * (1.0 + x) / (d * d * d);
    default: return x * (1.0 + x * (4.0 + x)) / (d * d * d * d);
    }
}

double poly_expectation(const Poly& poly, double p, double r) {
    double total = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const double coeff = poly.c[a][b];
            if (coeff == 0.0) continue;
            total += coeff * geometric_sum(a, p * std::pow(r, b));
        }
    return total * (1.0 - p) / p;
}

struct ServicePolys {
    Poly mean;   // E[X | R=j]
    Poly var;    // VAR[X | R=j]
    Poly third;  // third central moment of X | R=j
};

// Conditional moments as polynomials in (j, R), using the stage sums
// sum r^(i-1) = (R-1)/(r-1) and sum r^(2(i-1)) = (R^2-1)/(r^2-1).
ServicePolys service_polys(const BackoffConstants& c, const SlotTimes& st, const NetworkConfig& cfg) {
    const double r = cfg.backoff_factor;
    const double w = cfg.min_window;
    const double a1 = c.a1, a2 = c.a2, a3 = c.a3;
    const double tc = st.t_coll, ts = st.t_succ;
    const double k1 = w / (r - 1.0);
    const double k2 = w * w / (r * r - 1.0);

    ServicePolys sp;
    sp.mean.c[0][1] = a1 * k1 / 2.0;
    sp.mean.c[1][0] = tc - a1 / 2.0;
    sp.mean.c[0][0] = -a1 * k1 / 2.0 - tc + ts;

    sp.var.c[0][2] = a1 * a1 * k2 / 12.0;
    sp.var.c[0][1] = (a2 - a1 * a1) * k1 / 2.0;
    sp.var.c[1][0] = 5.0 * a1 * a1 / 12.0 - a2 / 2.0;
    sp.var.c[0][0] = -a1 * a1 * k2 / 12.0 + (a1 * a1 - a2) * k1 / 2.0;

    sp.third.c[0][2] = (a1 * a2 - a1 * a1 * a1) * k2 / 4.0;
    sp.third.c[0][1] = (a1 * a1 * a1 - 1.5 * a1 * a2 + a3 / 2.0) * k1;
    sp.third.c[1][0] = -0.75 * a1 * a1 * a1 + 1.25 * a1 * a2 - a3 / 2.0;
    sp.third.c[0][0] = -sp.third.c[0][2] - sp.third.c[0][1];
    return sp;
}

// Direct summation fallback for r within 1e-3 of 1, where the (r-1)
// denominators above lose precision. Long-double accumulators keep the
// growing window powers representable.
struct SeriesMoments {
    double m1, m2, m3;
    bool converged;
};

SeriesMoments series_moments(double p, const NetworkConfig& cfg, const BackoffConstants& c,
                             const SlotTimes& st, int want) {
    const long double a1 = c.a1, a2 = c.a2, a3 = c.a3;
    const long double tc = st.t_coll, ts = st.t_succ;
    const long double r = cfg.backoff_factor;
    long double wi = cfg.min_window;
    long double ec = 0, va = 0, m3c = 0;
    long double s1 = 0, s2 = 0, s3 = 0;
    long double pij = 1.0L - p;
    bool done = false;
    for (long j = 1; j <= 2000000; ++j) {
        ec += a1 * (wi - 1) / 2;
        va += a1 * a1 * (wi - 1) * (wi - 5) / 12 + a2 * (wi - 1) / 2;
        m3c += a1 * a1 * a1 * (-(wi * wi) + 4 * wi - 3) / 4
             + a1 * a2 * (wi * wi - 6 * wi + 5) / 4 + a3 * (wi - 1) / 2;
        const long double mu = ec + (j - 1) * tc + ts;
        const long double t1 = mu * pij;
        const long double t2 = (va + mu * mu) * pij;
        const long double t3 = (m3c + 3 * mu * va + mu * mu * mu) * pij;
        s1 += t1;
        s2 += t2;
        s3 += t3;
        const long double biggest = want >= 3 ? t3 : want == 2 ? t2 : t1;
        const long double ref = want >= 3 ? s3 : want == 2 ? s2 : s1;
        if (j > 4 && biggest < 1e-18L * ref) { done = true; break; }
        wi *= r;
        pij *= p;
    }
    return {static_cast<double>(s1), static_cast<double>(s2), static_cast<double>(s3), done};
}

} // namespace

ServiceMoments service_moments(double p_c, const BackoffConstants& c,
                               const SlotTimes& st, const NetworkConfig& cfg) {
    if (!(p_c >= 0.0 && p_c <= 1.0)) throw std::invalid_argument("p_c must lie in [0,1]");
    const double r = cfg.backoff_factor;

    ServiceMoments out;
    out.conditions.m1 = p_c * r < 1.0;
    out.conditions.m2 = p_c * r * r < 1.0;
    out.conditions.m3 = p_c * r * r * r < 1.0;

    const int want = out.conditions.m3 ? 3 : out.conditions.m2 ? 2 : out.conditions.m1 ? 1 : 0;
    if (want == 0) return out;

    if (p_c == 0.0) {
        // single attempt: X = C_1 + T_succ
        const CentralMoments cm = backoff_period_moments(1, c, cfg);
        const double mu = cm.mean + st.t_succ;
        out.m1 = mu;
        out.m2 = cm.variance + mu * mu;
        out.m3 = cm.third_central + 3.0 * mu * cm.variance + mu * mu * mu;
        return out;
    }

    if (std::abs(r - 1.0) < 1e-3) {
        const SeriesMoments sm = series_moments(p_c, cfg, c, st, want);
        if (!sm.converged) throw SolverError("service moment series did not converge");
        out.m1 = sm.m1;
        if (want >= 2) out.m2 = sm.m2;
        if (want >= 3) out.m3 = sm.m3;
        return out;
    }

    const ServicePolys sp = service_polys(c, st, cfg);
    out.m1 = poly_expectation(sp.mean, p_c, r);
    if (want >= 2) {
        Poly second = sp.mean * sp.mean;
        second += sp.var;
        out.m2 = poly_expectation(second, p_c, r);
    }
    if (want >= 3) {
        Poly third = sp.mean * sp.mean * sp.mean;
        third += scaled(sp.mean * sp.var, 3.0);
        third += sp.third;
        out.m3 = poly_expectation(third, p_c, r);
    }
    return out;
}

double service_transform(double s, double p_c, const SlotProbabilities& probs_b,
                         const SlotTimes& st, const NetworkConfig& cfg, double tol) {
    if (!(p_c >= 0.0 && p_c < 1.0)) throw std::invalid_argument("p_c must lie in [0,1)");
    const double z = countdown_slot_transform(s, probs_b, st);

    double sum = 0.0;
    double window_product = 1.0; // prod_{i<=j} B_i(L*(s))
    double weight = 1.0 - p_c;   // Pr{R = j}
    for (int j = 1; j <= 1000; ++j) {
        window_product *= backoff_window_transform(j, z, cfg);
        const double term = window_product
                          * std::exp(-s * ((j - 1) * st.t_coll + st.t_succ))
                          * weight;
        sum += term;
        if (j > 1 && std::abs(term) < tol * std::abs(sum)) return sum;
        if (p_c == 0.0) return sum; // single-term case
        weight *= p_c;
        if (!std::isfinite(sum)) break;
    }
    throw SolverError("service transform series did not converge");
}

} // namespace ebwlan
