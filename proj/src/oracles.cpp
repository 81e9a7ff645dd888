#include "altphase/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "altphase/errors.hpp"
#include "altphase/random.hpp"

namespace altphase::oracles {

namespace {

constexpr double kPi = std::numbers::pi;

void check_quadrature(const QuadratureSpec& quad) {
    if (quad.node_count < 16 || quad.node_count % 2 != 0)
        throw InvalidArgument("quadrature: node_count must be even and >= 16");
}

void check_beta(double beta) {
    if (!(beta >= 0.0) || !(beta < 1.0)) throw InvalidArgument("beta must lie in [0, 1)");
}

template <class Integrand>
double periodic_mean(const QuadratureSpec& quad, Integrand&& g) {
    const auto n = quad.node_count;
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double theta = -kPi + 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
        sum += g(theta);
    }
    return sum / static_cast<double>(n);
}

// No domain check; F extends to |beta| < 1 and is odd.
double f_beta_any(double beta, const QuadratureSpec& quad) {
    return periodic_mean(quad, [beta](double t) {
        const double c = std::cos(t);
        return (c + beta) / std::sqrt(1.0 + beta * beta + 2.0 * beta * c);
    });
}

struct ShardSums {
    double re = 0.0, re2 = 0.0, im = 0.0, im2 = 0.0;
    std::size_t count = 0;
};

// Runs `sampler(rng)` mc.samples times split across mc.shards streams and
// combines shard sums in shard order.
template <class Sampler>
MonteCarloEstimate sharded_mean(const MonteCarloSpec& mc, Sampler sampler) {
    if (mc.samples < 1) throw InvalidArgument("monte carlo: samples must be >= 1");
    const std::size_t shards = std::max<std::size_t>(1, std::min(mc.shards, mc.samples));
    std::vector<ShardSums> sums(shards);

    const auto run_shard = [&](std::size_t s) {
        Rng rng(derive_seed(mc.seed, {s}));
        const std::size_t count = mc.samples / shards + (s < mc.samples % shards ? 1 : 0);
        ShardSums acc;
        for (std::size_t i = 0; i < count; ++i) {
            const Complex u = sampler(rng);
            acc.re += u.real();
            acc.re2 += u.real() * u.real();
            acc.im += u.imag();
            acc.im2 += u.imag() * u.imag();
        }
        acc.count = count;
        sums[s] = acc;
    };

    std::size_t threads = mc.threads == 0 ? std::thread::hardware_concurrency() : mc.threads;
    threads = std::clamp<std::size_t>(threads, 1, shards);
    if (threads == 1) {
        for (std::size_t s = 0; s < shards; ++s) run_shard(s);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t s = w; s < shards; s += threads) run_shard(s);
            });
        for (auto& t : pool) t.join();
    }

    ShardSums total;
    for (const ShardSums& s : sums) {
        total.re += s.re;
        total.re2 += s.re2;
        total.im += s.im;
        total.im2 += s.im2;
        total.count += s.count;
    }
    const auto n = static_cast<double>(total.count);
    MonteCarloEstimate est;
    est.samples = total.count;
    est.mean = {total.re / n, total.im / n};
    if (total.count > 1) {
        const double var_re = std::max(0.0, (total.re2 - n * est.mean.real() * est.mean.real()) / (n - 1.0));
        const double var_im = std::max(0.0, (total.im2 - n * est.mean.imag() * est.mean.imag()) / (n - 1.0));
        est.stderr_real = std::sqrt(var_re / n);
        est.stderr_imag = std::sqrt(var_im / n);
    }
    return est;
}

std::string format(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

double f_beta(double beta, const QuadratureSpec& quad) {
    check_quadrature(quad);
    check_beta(beta);
    return f_beta_any(beta, quad);
}

double f_beta_derivative(double beta, const QuadratureSpec& quad) {
    check_quadrature(quad);
    check_beta(beta);
    return periodic_mean(quad, [beta](double t) {
        const double s = std::sin(t);
        const double d = 1.0 + beta * beta + 2.0 * beta * std::cos(t);
        return s * s / (d * std::sqrt(d));
    });
}

MonteCarloEstimate expected_u_monte_carlo(double alpha, const MonteCarloSpec& mc) {
    if (!(alpha > 0.0) || alpha > 1.0) throw InvalidArgument("expected_u: alpha must lie in (0, 1]");
    const double s = std::sqrt(1.0 - alpha * alpha);
    return sharded_mean(mc, [alpha, s](Rng& rng) {
        const Complex w1 = standard_complex_normal(rng);
        const Complex w2 = standard_complex_normal(rng);
        const double r1 = std::abs(w1);
        if (r1 == 0.0) return Complex(0.0, 0.0);  // measure-zero event
        return r1 * w2 * (phase(1.0 + s * std::conj(w2) / (alpha * r1)).value() - 1.0);
    });
}

bool phase_perturbation_check(Complex w) {
    return std::abs(phase(1.0 + w).value() - 1.0) <= 2.0 * std::abs(w);
}

double support_expectation(double xj) {
    if (!(xj >= 0.0) || !(xj <= 1.0)) throw InvalidArgument("support_expectation: xj must lie in [0, 1]");
    return 2.0 / kPi * (std::sqrt(1.0 - xj * xj) + xj * std::asin(xj));
}

MonteCarloEstimate support_expectation_monte_carlo(double xj, const MonteCarloSpec& mc) {
    if (!(xj >= 0.0) || !(xj <= 1.0)) throw InvalidArgument("support_expectation: xj must lie in [0, 1]");
    const double c = std::sqrt(1.0 - xj * xj);
    return sharded_mean(mc, [xj, c](Rng& rng) {
        std::normal_distribution<double> normal(0.0, 1.0);
        const double g1 = normal(rng);
        const double g2 = normal(rng);
        return Complex(std::abs(g1) * std::abs(xj * g1 + c * g2), 0.0);
    });
}

InitDiagonal init_matrix_diagonal_monte_carlo(const MonteCarloSpec& mc) {
    InitDiagonal out;
    out.leading = sharded_mean(mc, [](Rng& rng) {
        return Complex(std::pow(std::norm(standard_complex_normal(rng)), 2), 0.0);
    });
    MonteCarloSpec off = mc;
    off.seed = derive_seed(mc.seed, {0xd1a6});
    out.offleading = sharded_mean(off, [](Rng& rng) {
        const double a = std::norm(standard_complex_normal(rng));
        const double b = std::norm(standard_complex_normal(rng));
        return Complex(a * b, 0.0);
    });
    return out;
}

std::vector<LemmaCheck> validate_lemmas(const LemmaSuiteOptions& options) {
    std::vector<LemmaCheck> checks;
    const QuadratureSpec quad;
    const auto add = [&checks](std::string name, bool passed, double value, double bound, std::string detail) {
        checks.push_back({std::move(name), passed, value, bound, std::move(detail)});
    };

    {
        Rng rng(derive_seed(options.seed, {1}));
        std::uniform_real_distribution<double> log_mag(std::log(1e-6), std::log(1e3));
        std::uniform_real_distribution<double> angle(-kPi, kPi);
        std::size_t failures = 0;
        double worst = 0.0;
        for (std::size_t i = 0; i < options.fuzz_samples; ++i) {
            const Complex w = std::polar(std::exp(log_mag(rng)), angle(rng));
            if (!phase_perturbation_check(w)) ++failures;
            worst = std::max(worst, std::abs(phase(1.0 + w).value() - 1.0) / (2.0 * std::abs(w)));
        }
        add("phase_perturbation_fuzz", failures == 0, worst, 1.0,
            std::to_string(options.fuzz_samples) + " samples, max |Ph(1+w)-1|/(2|w|)");
    }
    {
        const double v = f_beta(0.0, quad);
        add("f_beta_at_zero", std::abs(v) <= 1e-12, v, 1e-12, "|F(0)|");
    }
    {
        const double v = f_beta_derivative(0.0, quad);
        add("f_beta_derivative_at_zero", std::abs(v - 0.5) <= 1e-6, v, 0.5, "F'(0) = 1/2 within 1e-6");
    }
    {
        double worst = 0.0;
        for (int i = 1; i <= 50; ++i) {
            const double beta = 0.001 * i;
            worst = std::max(worst, std::abs(f_beta(beta, quad)) / beta);
        }
        add("f_beta_small_beta_bound", worst <= 0.55, worst, 0.55,
            "max |F(b)|/b over b in {0.001..0.05} (gamma = delta = 0.05)");
    }
    {
        double worst = 0.0;
        const double h = 1e-4;
        for (int i = 0; i <= 9; ++i) {
            const double beta = 0.1 * i;
            const double fd = (f_beta_any(beta + h, quad) - f_beta_any(beta - h, quad)) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - f_beta_derivative(beta, quad)));
        }
        add("f_beta_derivative_finite_difference", worst <= 1e-5, worst, 1e-5,
            "max |F' - central difference| over b in {0..0.9}");
    }
    {
        double smallest = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 9; ++i) smallest = std::min(smallest, f_beta_derivative(0.1 * i, quad));
        add("f_beta_derivative_positive", smallest > 0.0, smallest, 0.0, "min F'(b) over b in {0..0.9}");
    }
    {
        const double v = f_beta(0.5, quad);
        add("f_beta_midrange", v > 0.0 && v < 0.5, v, 0.5, "0 < F(0.5) < 0.5");
    }
    {
        const MonteCarloEstimate e = expected_u_monte_carlo(1.0, {1000, derive_seed(options.seed, {2}), 8, options.threads});
        add("expected_u_alpha_one", e.mean == Complex(0.0, 0.0), std::abs(e.mean), 0.0, "U = 0 when alpha = 1");
    }
    const double alpha = 0.995;
    const double s = std::sqrt(1.0 - alpha * alpha);
    const MonteCarloSpec mc_u{options.mc_samples, derive_seed(options.seed, {3}), 8, options.threads};
    const MonteCarloEstimate eu = expected_u_monte_carlo(alpha, mc_u);
    add("expected_u_bound", std::abs(eu.mean) <= 1.1 * s, std::abs(eu.mean), 1.1 * s,
        "|E U| <= 1.1 sqrt(1-alpha^2) at alpha = 0.995");
    add("expected_u_imaginary_zero", std::abs(eu.mean.imag()) <= 3.0 * eu.stderr_imag, eu.mean.imag(),
        3.0 * eu.stderr_imag, "|Im E U| within 3 standard errors");
    {
        MonteCarloSpec quarter = mc_u;
        quarter.samples = std::max<std::size_t>(1, options.mc_samples / 4);
        quarter.seed = derive_seed(options.seed, {4});
        const MonteCarloEstimate small = expected_u_monte_carlo(alpha, quarter);
        const double ratio = small.stderr_real / eu.stderr_real;
        add("expected_u_stderr_scaling", ratio >= 1.8 && ratio <= 2.2, ratio, 2.0,
            "stderr(N/4) / stderr(N) in [1.8, 2.2]");
    }
    {
        const double v = support_expectation(0.0);
        add("support_expectation_off_support", std::abs(v - 2.0 / kPi) <= 1e-12, v, 2.0 / kPi, "E Z = 2/pi");
        const double w = support_expectation(1.0);
        add("support_expectation_full_weight", std::abs(w - 1.0) <= 1e-12, w, 1.0, "E Z = 1 at x = 1");
    }
    {
        bool increasing = true;
        double prev = support_expectation(0.0);
        for (int i = 1; i <= 100; ++i) {
            const double v = support_expectation(0.01 * i);
            increasing = increasing && v > prev && v > 2.0 / kPi;
            prev = v;
        }
        add("support_expectation_gap", increasing, support_expectation(0.01) - 2.0 / kPi, 0.0,
            "strictly increasing and above 2/pi on (0, 1]");
    }
    {
        const MonteCarloEstimate e = support_expectation_monte_carlo(
            0.5, {options.mc_samples, derive_seed(options.seed, {5}), 8, options.threads});
        const double exact = support_expectation(0.5);
        const double gap = std::abs(e.mean.real() - exact);
        add("support_expectation_monte_carlo", gap <= 3.0 * e.stderr_real, e.mean.real(), exact,
            "real Gaussian Monte Carlo at x = 0.5 within 3 standard errors (|diff| = " + format(gap) + ")");
    }
    {
        const InitDiagonal d = init_matrix_diagonal_monte_carlo(
            {options.mc_samples, derive_seed(options.seed, {6}), 8, options.threads});
        add("init_diagonal_fourth_moment", std::abs(d.leading.mean.real() - 8.0) <= 3.0 * d.leading.stderr_real,
            d.leading.mean.real(), 8.0, "E|a|^4 = 8 within 3 standard errors");
        add("init_diagonal_ratio", d.ratio() > 1.0, d.ratio(), 1.0,
            "E|a|^4 / E|a|^2|b|^2 > 1 (off-diagonal constant not asserted)");
    }
    return checks;
}

nlohmann::json to_json(const std::vector<LemmaCheck>& checks) {
    nlohmann::json rows = nlohmann::json::array();
    bool all = true;
    for (const LemmaCheck& c : checks) {
        rows.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"bound", c.bound},
                        {"detail", c.detail}});
        all = all && c.passed;
    }
    return {{"checks", std::move(rows)}, {"all_passed", all}};
}

}  // namespace altphase::oracles
