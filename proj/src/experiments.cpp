#include "bqmc/experiments.hpp"

#include "bqmc/errors.hpp"
#include "bqmc/normal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bqmc {

RatioTable variance_ratio_table(const std::vector<ExperimentConfig>& configs, std::optional<Method> baseline,
                                const std::vector<Method>& comparisons, const ProgressFn& progress) {
    RatioTable table;
    for (const ExperimentConfig& config : configs) {
        const Method base = baseline.value_or(config.baseline);
        std::vector<Method> methods = comparisons;
        if (methods.empty())
            for (Method m : config.methods)
                if (m != base) methods.push_back(m);

        Pricer pricer(config);
        if (progress) progress(config.name, base);
        const EstimateSummary ref = pricer.run(base);
        if (!ref.std_error) throw std::invalid_argument(config.name + ": baseline needs at least two replications");
        table.baselines.push_back(ref);
        for (Method m : methods) {
            if (progress) progress(config.name, m);
            const EstimateSummary s = m == base ? ref : pricer.run(m);
            if (!s.std_error) throw std::invalid_argument(config.name + ": standard error needs M >= 2");
            RatioRow row;
            row.config = config.name;
            row.method = m;
            row.sigma = *s.std_error;
            row.ratio_pct = m == base ? 100.0 : 100.0 * *ref.std_error / *s.std_error;
            row.mean = s.mean;
            table.rows.push_back(row);
            table.summaries.push_back(s);
        }
    }
    return table;
}

LinearFit ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least squares needs at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("least squares needs two distinct abscissae");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

std::vector<std::size_t> power_of_two_grid(int lo, int hi) {
    std::vector<std::size_t> grid;
    for (int k = lo; k <= hi; ++k) grid.push_back(std::size_t{1} << k);
    return grid;
}

ConvergenceResult convergence_alpha(const ExperimentConfig& config, Method method,
                                    const std::vector<std::size_t>& n_grid) {
    if (n_grid.size() < 4) throw std::invalid_argument("convergence grid needs at least four budgets");
    for (std::size_t n : n_grid)
        if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("convergence budgets must be powers of two");

    ConvergenceResult out;
    out.method = method;
    Pricer pricer(config);
    std::vector<double> x, y;
    for (std::size_t n : n_grid) {
        const EstimateSummary s = pricer.run(method, n, config.m_shifts);
        if (!s.std_error) throw std::invalid_argument("convergence needs at least two replications");
        out.points.push_back({n, s.mean, *s.std_error});
        if (!(*s.std_error > 0.0)) {
            out.excluded.push_back(n);
            continue;
        }
        x.push_back(std::log(static_cast<double>(n)));
        y.push_back(std::log(*s.std_error));
    }
    const LinearFit fit = ols_fit(x, y);
    out.alpha = -fit.slope;
    out.beta = fit.intercept;
    return out;
}

double black_scholes_put(double s0, double strike, double sigma, double rate, double maturity) {
    const double v = sigma * std::sqrt(maturity);
    const double d1 = (std::log(s0 / strike) + (rate + 0.5 * sigma * sigma) * maturity) / v;
    const double d2 = d1 - v;
    return strike * std::exp(-rate * maturity) * norm_cdf(-d2) - s0 * norm_cdf(-d1);
}

double analytic_down_in_put(double s0, double strike, double barrier, double sigma, double rate, double maturity) {
    if (!(s0 > 0.0 && strike > 0.0 && barrier > 0.0 && sigma > 0.0 && maturity > 0.0))
        throw std::domain_error("down-and-in put needs positive S0, K, B, sigma and T");
    if (barrier > s0) throw std::domain_error("down-and-in put formula needs B <= S0");
    if (!(barrier < strike)) throw std::domain_error("down-and-in put formula needs B < K");

    const double v = sigma * std::sqrt(maturity);
    const double mu = (rate - 0.5 * sigma * sigma) / (sigma * sigma);
    const double df = std::exp(-rate * maturity);
    const double x2 = std::log(s0 / barrier) / v + (1.0 + mu) * v;
    const double y1 = std::log(barrier * barrier / (s0 * strike)) / v + (1.0 + mu) * v;
    const double y2 = std::log(barrier / s0) / v + (1.0 + mu) * v;
    const double ratio = barrier / s0;
    const double p_up = std::pow(ratio, 2.0 * (mu + 1.0));
    const double p_dn = std::pow(ratio, 2.0 * mu);

    // phi = -1 (put), eta = +1 (down barrier)
    const double b_term = -s0 * norm_cdf(-x2) + strike * df * norm_cdf(-x2 + v);
    const double c_term = -s0 * p_up * norm_cdf(y1) + strike * df * p_dn * norm_cdf(y1 - v);
    const double d_term = -s0 * p_up * norm_cdf(y2) + strike * df * p_dn * norm_cdf(y2 - v);
    return b_term - c_term + d_term;
}

}  // namespace bqmc
