// quadrature.cpp

#include "nearfield/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "nearfield/constants.hpp"
#include "nearfield/errors.hpp"

namespace nearfield::quadrature {

namespace {

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

double magnitude(double x) { return std::abs(x); }
double magnitude(const std::complex<double>& x) { return std::abs(x); }

template <class T>
struct Segment {
    double a;
    double b;
    T value;
    double error;
    std::size_t piece;
};

template <class T>
struct Piece {
    std::function<T(double)> f;
    double a;
    double b;
};

// One Gauss-Kronrod panel with the QUADPACK error heuristic.
template <class T>
Segment<T> gk15(const std::function<T(double)>& f, double a, double b, std::size_t piece) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<T, 7> f1{};
    std::array<T, 7> f2{};
    const T fc = f(centre);
    T resk = kronrod_weights[7] * fc;
    T resg = gauss_weights[3] * fc;
    double resabs = kronrod_weights[7] * magnitude(fc);
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        f1[j] = f(centre - dx);
        f2[j] = f(centre + dx);
        resk += kronrod_weights[j] * (f1[j] + f2[j]);
        resabs += kronrod_weights[j] * (magnitude(f1[j]) + magnitude(f2[j]));
        if (j % 2 == 1) {
            resg += gauss_weights[j / 2] * (f1[j] + f2[j]);
        }
    }
    const T mean = 0.5 * resk;
    double resasc = kronrod_weights[7] * magnitude(fc - mean);
    for (std::size_t j = 0; j < 7; ++j) {
        resasc += kronrod_weights[j] * (magnitude(f1[j] - mean) + magnitude(f2[j] - mean));
    }
    const double width = std::abs(half);
    resasc *= width;
    resabs *= width;
    double err = magnitude((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    if (resabs > DBL_MIN / (50.0 * DBL_EPSILON)) {
        err = std::max(50.0 * DBL_EPSILON * resabs, err);
    }
    if (!std::isfinite(magnitude(resk))) {
        err = INFINITY;
    }
    return Segment<T>{a, b, resk * half, err, piece};
}

template <class T>
QuadratureResult<T> adaptive(const std::vector<Piece<T>>& pieces, const Options& opts) {
    auto cmp = [](const Segment<T>& l, const Segment<T>& r) { return l.error < r.error; };
    std::priority_queue<Segment<T>, std::vector<Segment<T>>, decltype(cmp)> queue(cmp);
    std::vector<Segment<T>> frozen;
    int evaluations = 0;

    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (pieces[i].b == pieces[i].a) {
            continue;
        }
        queue.push(gk15(pieces[i].f, pieces[i].a, pieces[i].b, i));
        evaluations += 15;
    }

    auto totals = [&]() {
        T value{};
        double error = 0.0;
        auto copy = queue;
        while (!copy.empty()) {
            value += copy.top().value;
            error += copy.top().error;
            copy.pop();
        }
        for (const auto& s : frozen) {
            value += s.value;
            error += s.error;
        }
        return std::pair{value, error};
    };

    T value{};
    double error = 0.0;
    {
        auto [v, e] = totals();
        value = v;
        error = e;
    }
    while (true) {
        const double target = std::max(opts.rel_tol * magnitude(value), opts.abs_tol);
        if (error <= target) {
            auto [v, e] = totals();
            value = v;
            error = e;
            if (error <= std::max(opts.rel_tol * magnitude(value), opts.abs_tol)) {
                return {value, error, evaluations};
            }
        }
        if (queue.empty() || evaluations >= opts.max_evaluations || !std::isfinite(error)) {
            std::ostringstream msg;
            msg << "quadrature did not converge after " << evaluations
                << " evaluations (error estimate " << error << ")";
            throw ConvergenceError(msg.str(), std::complex<double>(value), error);
        }
        Segment<T> worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b)) ||
            std::abs(worst.b - worst.a) < 64.0 * DBL_EPSILON * std::max(std::abs(worst.a), std::abs(worst.b))) {
            frozen.push_back(worst);
            continue;
        }
        const auto& f = pieces[worst.piece].f;
        Segment<T> left = gk15(f, worst.a, mid, worst.piece);
        Segment<T> right = gk15(f, mid, worst.b, worst.piece);
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }
}

// Head [lower, U] split into equal panels plus breakpoints; tail mapped onto (0, 1].
template <class T>
QuadratureResult<T> semi_infinite_from(const std::function<T(double)>& f, double lower,
                                       double decay_scale, const Options& opts) {
    if (!(decay_scale > 0.0)) {
        throw std::invalid_argument("integrate_semi_infinite: decay_scale must be positive");
    }
    if (!(opts.rel_tol > 0.0)) {
        throw std::invalid_argument("integrate_semi_infinite: tolerance must be positive");
    }
    const double cutoff = lower + opts.cutoff_factor * decay_scale;
    std::vector<double> edges{lower};
    constexpr int head_panels = 4;
    for (int i = 1; i < head_panels; ++i) {
        edges.push_back(lower + (cutoff - lower) * i / head_panels);
    }
    for (double bp : opts.breakpoints) {
        if (bp > lower && bp < cutoff) {
            edges.push_back(bp);
        }
    }
    edges.push_back(cutoff);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::vector<Piece<T>> pieces;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        pieces.push_back({f, edges[i], edges[i + 1]});
    }
    const double span = cutoff - lower;
    auto tail = [&f, lower, span](double t) -> T {
        if (t <= 0.0) {
            return T{};
        }
        const double u = lower + span / t;
        const T fu = f(u);
        return fu == T{} ? T{} : fu * (span / (t * t));
    };
    pieces.push_back({tail, 0.0, 1.0});
    return adaptive(pieces, opts);
}

double bessel_j(int order, double x) {
    switch (order) {
        case 0: return std::cyl_bessel_j(0.0, x);
        case 1: return std::cyl_bessel_j(1.0, x);
        case 2: return std::cyl_bessel_j(2.0, x);
        default: throw std::invalid_argument("integrate_bessel_weighted: order must be 0, 1 or 2");
    }
}

// Wynn epsilon extrapolation over a sliding window of partial sums.
template <class T>
class WynnEpsilon {
public:
    T push(T partial_sum) {
        sums_.push_back(partial_sum);
        if (sums_.size() > window) {
            sums_.erase(sums_.begin());
        }
        const std::size_t n = sums_.size();
        if (n < 3) {
            return partial_sum;
        }
        std::vector<T> prev(n, T{});
        std::vector<T> cur(sums_.begin(), sums_.end());
        T best = partial_sum;
        for (std::size_t k = 1; k < n; ++k) {
            std::vector<T> next(n - k);
            for (std::size_t i = 0; i + k < n; ++i) {
                const T diff = cur[i + 1] - cur[i];
                if (magnitude(diff) == 0.0) {
                    return cur[i + 1];
                }
                next[i] = prev[i + 1] + T(1.0) / diff;
            }
            prev.assign(cur.begin() + 1, cur.end());
            cur = std::move(next);
            if (k % 2 == 0) {
                best = cur.back();
            }
        }
        return best;
    }

private:
    static constexpr std::size_t window = 16;
    std::vector<T> sums_;
};

template <class T>
QuadratureResult<T> bessel_impl(const std::function<T(double)>& envelope, int order, double s,
                                double decay_scale, double tol, double lower) {
    if (s < 0.0) {
        throw std::invalid_argument("integrate_bessel_weighted: s must be non-negative");
    }
    if (order < 0 || order > 2) {
        throw std::invalid_argument("integrate_bessel_weighted: order must be 0, 1 or 2");
    }
    Options opts;
    opts.rel_tol = tol;
    if (s == 0.0) {
        if (order != 0) {
            return {T{}, 0.0, 1};
        }
        return semi_infinite_from(envelope, lower, decay_scale, opts);
    }
    std::function<T(double)> product = [&envelope, order, s](double u) -> T {
        return envelope(u) * bessel_j(order, u * s);
    };
    const double cutoff = lower + default_cutoff_factor * decay_scale;
    const double spacing = constants::pi / s;
    auto zero = [order, spacing](long m) { return (m + 0.5 * order - 0.25) * spacing; };

    long first = std::max(1L, static_cast<long>(std::ceil(lower / spacing - 0.5 * order + 0.25)));
    while (zero(first) <= lower) {
        ++first;
    }
    if (zero(first + 2) >= cutoff) {
        // fewer than two oscillations inside the decay range
        return semi_infinite_from(product, lower, decay_scale, opts);
    }

    std::vector<Piece<T>> head;
    double edge = lower;
    long m = first;
    while (edge < cutoff) {
        const double next = zero(m++);
        head.push_back({product, edge, next});
        edge = next;
    }
    Options head_opts;
    head_opts.rel_tol = 0.5 * tol;
    auto head_result = adaptive(head, head_opts);

    T sum = head_result.value;
    double error = head_result.error_estimate;
    int evaluations = head_result.evaluations;
    WynnEpsilon<T> wynn;
    wynn.push(sum);
    T estimate = sum;
    T previous = sum;
    int small_panels = 0;
    int stable = 0;
    constexpr int max_tail_panels = 20000;
    for (int panel = 0; panel < max_tail_panels; ++panel) {
        const double a = edge;
        const double b = zero(m++);
        edge = b;
        Options panel_opts;
        panel_opts.rel_tol = 0.1 * tol;
        panel_opts.abs_tol = 0.05 * tol * std::max(magnitude(sum), DBL_MIN);
        auto p = adaptive(std::vector<Piece<T>>{{product, a, b}}, panel_opts);
        evaluations += p.evaluations;
        error += p.error_estimate;
        sum += p.value;
        previous = estimate;
        estimate = wynn.push(sum);

        const double scale = std::max(magnitude(sum), DBL_MIN);
        small_panels = magnitude(p.value) < 0.1 * tol * scale ? small_panels + 1 : 0;
        stable = magnitude(estimate - previous) < 0.25 * tol * scale ? stable + 1 : 0;
        if (small_panels >= 2) {
            return {sum, error + magnitude(p.value), evaluations};
        }
        if (stable >= 3 && panel >= 4) {
            return {estimate, error + magnitude(estimate - previous), evaluations};
        }
    }
    throw ConvergenceError("integrate_bessel_weighted: tail did not converge",
                           std::complex<double>(estimate), magnitude(estimate - previous));
}

}  // namespace

namespace detail {

QuadratureResult<double> finite(const RealIntegrand& f, double a, double b, const Options& opts) {
    return adaptive(std::vector<Piece<double>>{{f, a, b}}, opts);
}

QuadratureResult<std::complex<double>> finite(const ComplexIntegrand& f, double a, double b,
                                              const Options& opts) {
    return adaptive(std::vector<Piece<std::complex<double>>>{{f, a, b}}, opts);
}

QuadratureResult<double> semi_infinite(const RealIntegrand& f, double decay_scale,
                                       const Options& opts) {
    return semi_infinite_from(f, 0.0, decay_scale, opts);
}

QuadratureResult<std::complex<double>> semi_infinite(const ComplexIntegrand& f,
                                                     double decay_scale, const Options& opts) {
    return semi_infinite_from(f, 0.0, decay_scale, opts);
}

QuadratureResult<double> bessel(const RealIntegrand& envelope, int order, double s,
                                double decay_scale, double tol, double lower) {
    return bessel_impl(envelope, order, s, decay_scale, tol, lower);
}

QuadratureResult<std::complex<double>> bessel(const ComplexIntegrand& envelope, int order,
                                              double s, double decay_scale, double tol,
                                              double lower) {
    return bessel_impl(envelope, order, s, decay_scale, tol, lower);
}

}  // namespace detail

}  // namespace nearfield::quadrature
