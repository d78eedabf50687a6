#include "blowup/nonlinearity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace blowup {

namespace {

// ---------------------------------------------------------------------
// Minimal expression parser for one variable t: + - * / ^ ( ), log, exp,
// sqrt, numeric literals.  '^' binds tighter than unary minus and is
// right-associative.
// ---------------------------------------------------------------------
struct Expr {
    virtual ~Expr() = default;
    virtual double eval(double t) const = 0;
};
using ExprPtr = std::shared_ptr<const Expr>;

struct Num : Expr {
    double v;
    explicit Num(double x) : v(x) {}
    double eval(double) const override { return v; }
};
struct Var : Expr {
    double eval(double t) const override { return t; }
};
struct Bin : Expr {
    char op;
    ExprPtr a, b;
    Bin(char o, ExprPtr x, ExprPtr y) : op(o), a(std::move(x)), b(std::move(y)) {}
    double eval(double t) const override {
        double x = a->eval(t), y = b->eval(t);
        switch (op) {
            case '+': return x + y;
            case '-': return x - y;
            case '*': return x * y;
            case '/': return x / y;
            case '^': return std::pow(x, y);
        }
        return std::numeric_limits<double>::quiet_NaN();
    }
};
struct Neg : Expr {
    ExprPtr a;
    explicit Neg(ExprPtr x) : a(std::move(x)) {}
    double eval(double t) const override { return -a->eval(t); }
};
struct Fun : Expr {
    int which;  // 0 log, 1 exp, 2 sqrt
    ExprPtr a;
    Fun(int w, ExprPtr x) : which(w), a(std::move(x)) {}
    double eval(double t) const override {
        double x = a->eval(t);
        switch (which) {
            case 0: return std::log(x);
            case 1: return std::exp(x);
            case 2: return std::sqrt(x);
        }
        return std::numeric_limits<double>::quiet_NaN();
    }
};

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}
    ExprPtr parse() {
        auto e = expr();
        skip_ws();
        if (pos_ != s_.size())
            throw std::invalid_argument("expression: trailing input at position " +
                                        std::to_string(pos_));
        return e;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    ExprPtr expr() {
        auto e = term();
        while (true) {
            if (eat('+')) e = std::make_shared<Bin>('+', e, term());
            else if (eat('-')) e = std::make_shared<Bin>('-', e, term());
            else return e;
        }
    }
    ExprPtr term() {
        auto e = unary();
        while (true) {
            if (eat('*')) e = std::make_shared<Bin>('*', e, unary());
            else if (eat('/')) e = std::make_shared<Bin>('/', e, unary());
            else return e;
        }
    }
    ExprPtr unary() {
        if (eat('-')) return std::make_shared<Neg>(unary());
        return power();
    }
    ExprPtr power() {
        auto base = primary();
        if (eat('^')) return std::make_shared<Bin>('^', base, unary());
        return base;
    }
    ExprPtr primary() {
        skip_ws();
        if (eat('(')) {
            auto e = expr();
            if (!eat(')')) throw std::invalid_argument("expression: missing ')'");
            return e;
        }
        char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin) throw std::invalid_argument("expression: bad number");
            pos_ += static_cast<std::size_t>(end - begin);
            return std::make_shared<Num>(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   std::isalpha(static_cast<unsigned char>(s_[pos_])))
                ++pos_;
            std::string id = s_.substr(start, pos_ - start);
            if (id == "t") return std::make_shared<Var>();
            int which = id == "log" ? 0 : id == "exp" ? 1 : id == "sqrt" ? 2 : -1;
            if (which < 0)
                throw std::invalid_argument("expression: unknown identifier '" + id + "'");
            if (!eat('(')) throw std::invalid_argument("expression: expected '(' after " + id);
            auto a = expr();
            if (!eat(')')) throw std::invalid_argument("expression: missing ')'");
            return std::make_shared<Fun>(which, a);
        }
        throw std::invalid_argument("expression: unexpected character at position " +
                                    std::to_string(pos_));
    }
};

void require_nonnegative(double t, const char* what) {
    if (t < 0.0)
        throw std::domain_error(std::string(what) +
                                ": negative argument (f is defined on [0,inf) only)");
}

}  // namespace

Nonlinearity Nonlinearity::power(double p) {
    if (!(p > 1.0))
        throw std::invalid_argument("Nonlinearity::power: p must exceed 1 (0 < m)");
    Nonlinearity nl;
    nl.family_ = "power";
    nl.p_ = p;
    nl.m_ = nl.M_ = p - 1.0;
    nl.f_ = [p](double t) { return std::pow(t, p); };
    nl.fp_ = [p](double t) { return p * std::pow(t, p - 1.0); };
    return nl;
}

Nonlinearity Nonlinearity::custom(const std::string& expression) {
    ExprPtr ast = Parser(expression).parse();
    Nonlinearity nl;
    nl.family_ = "custom";
    nl.expression_ = expression;
    nl.f_ = [ast](double t) { return ast->eval(t); };
    auto base = nl.f_;
    nl.fp_ = [base](double t) { return fd_derivative(base, t); };

    double f0 = nl.f_(0.0);
    if (!std::isfinite(f0) || std::abs(f0) > 1e-12)
        throw std::invalid_argument("Nonlinearity::custom: f(0) != 0");
    // exponent bounds from t f'/f over a wide log grid
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    double prev = 0.0;
    for (double t : geometric_grid(1e-8, 1e8, 4)) {
        double v = nl.f_(t);
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("Nonlinearity::custom: f not positive at t=" +
                                        std::to_string(t));
        if (v <= prev)
            throw std::invalid_argument("Nonlinearity::custom: f not increasing");
        prev = v;
        double r = t * nl.fp_(t) / v;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    if (!(lo > 1.0))
        throw std::invalid_argument(
            "Nonlinearity::custom: t f'/f must stay above 1 (0 < m) on the sample grid");
    nl.m_ = lo - 1.0;
    nl.M_ = hi - 1.0;
    // eager antiderivative cache so evaluators stay pure afterwards
    auto fcopy = nl.f_;
    nl.f_cache_ = std::make_shared<LogChebCache>(
        [fcopy](double x) {
            return integrate([&](double s) { return fcopy(s); }, 0.0, x, {1e-11, 18});
        },
        1e-12, 1e12, 24, 2);
    return nl;
}

double Nonlinearity::power_exponent() const {
    if (family_ != "power")
        throw std::logic_error("Nonlinearity::power_exponent: not a power family");
    return p_;
}

double Nonlinearity::f(double t) const {
    require_nonnegative(t, "Nonlinearity::f");
    if (t == 0.0) return 0.0;
    return f_(t);
}

double Nonlinearity::f_prime(double t) const {
    require_nonnegative(t, "Nonlinearity::f_prime");
    if (t == 0.0) return 0.0;  // f' (0) = 0 for the whole class (f <= f(1) t^{1+m} near 0)
    return fp_(t);
}

double Nonlinearity::antiderivative_F(double t) const {
    if (!(t > 0.0))
        throw std::invalid_argument("antiderivative_F: t must be positive");
    if (family_ == "power") return std::pow(t, p_ + 1.0) / (p_ + 1.0);
    return integrate([this](double s) { return f_(s); }, 0.0, t, {1e-11, 18});
}

double Nonlinearity::F_for_transform(double s) const {
    if (family_ == "power") return std::pow(s, p_ + 1.0) / (p_ + 1.0);
    if (f_cache_ && s >= f_cache_->lo() && s <= f_cache_->hi()) return (*f_cache_)(s);
    return antiderivative_F(s);
}

double Nonlinearity::varphi(double t) const {
    if (!(t > 0.0)) throw std::invalid_argument("varphi: t must be positive");
    // choose cutoff T: majorant (2/m) T F(T)^{-1/2} below 1e-12 of the running value
    double T = t * 4.0;
    double acc = 0.0;
    double lo = t;
    const QuadOptions q{1e-11, 15};
    for (int k = 0; k < 2000; ++k) {
        auto g = [this](double s) { return 1.0 / std::sqrt(F_for_transform(s)); };
        // log substitution keeps the per-segment integrand mild
        double a = std::log(lo), b = std::log(T);
        acc += integrate([&](double u) {
            double s = std::exp(u);
            return g(s) * s;
        }, a, b, q);
        double majorant = (2.0 / m_) * T / std::sqrt(F_for_transform(T));
        if (majorant < 1e-12 * acc) return acc;
        lo = T;
        T *= 8.0;
        if (T > 1e290)
            throw std::runtime_error("varphi: tail failed to converge (inconsistent f)");
    }
    throw std::runtime_error("varphi: tail failed to converge");
}

double Nonlinearity::psi(double t) const {
    if (!(t > 0.0)) throw std::invalid_argument("psi: t must be positive");
    return monotone_inverse([this](double x) { return varphi(x); }, t,
                            /*increasing=*/false, 1.0, 1e-12);
}

F1Report check_f1(const Nonlinearity& nl, std::span<const double> grid) {
    if (grid.size() < 16)
        throw std::invalid_argument("check_f1: grid must contain at least 16 points");
    F1Report rep;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double t : grid) {
        if (!(t > 0.0)) throw std::invalid_argument("check_f1: grid must be positive");
        double v = nl.f(t);
        if (v == 0.0) throw std::runtime_error("check_f1: f vanishes at sampled t > 0");
        double r = t * nl.f_prime(t) / v;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    rep.m_hat = lo - 1.0;
    rep.M_hat = hi - 1.0;
    rep.verdict = rep.m_hat > 0.0 && rep.m_hat <= rep.M_hat;
    return rep;
}

TransformReport check_transform_properties(const Nonlinearity& nl,
                                           std::span<const double> grid) {
    TransformReport rep;
    const double m = nl.exponent_m(), M = nl.exponent_M();
    const double slack = 1e-5;  // finite-difference headroom on the bounds

    double varphi_lo = 0.0, varphi_hi = 0.0, psi_lo = 0.0, psi_hi = 0.0;
    varphi_lo = varphi_hi = psi_lo = psi_hi = std::numeric_limits<double>::infinity();
    double f2lo = std::numeric_limits<double>::infinity(), f2hi = 0.0;
    double mono_m = std::numeric_limits<double>::infinity();
    double mono_M = std::numeric_limits<double>::infinity();

    double prev_t = 0.0, prev_pm = 0.0, prev_pM = 0.0;
    bool have_prev = false;
    for (double t : grid) {
        if (!(t > 0.0))
            throw std::invalid_argument("check_transform_properties: grid must be positive");
        double vp = nl.varphi(t);
        double dvp = std::abs(fd_derivative([&](double x) { return nl.varphi(x); }, t));
        double lo_bound = 0.5 * m * vp / t, hi_bound = 0.5 * M * vp / t;
        varphi_lo = std::min(varphi_lo, (dvp - lo_bound) / hi_bound + slack);
        varphi_hi = std::min(varphi_hi, (hi_bound - dvp) / hi_bound + slack);

        f2lo = std::min(f2lo, std::sqrt(t / nl.f(t)) / vp);
        f2hi = std::max(f2hi, std::sqrt(t / nl.f(t)) / vp);

        double ps = nl.psi(t);
        double dps = std::abs(fd_derivative([&](double x) { return nl.psi(x); }, t));
        double p_lo = 2.0 / M * ps / t, p_hi = 2.0 / m * ps / t;
        psi_lo = std::min(psi_lo, (dps - p_lo) / p_hi + slack);
        psi_hi = std::min(psi_hi, (p_hi - dps) / p_hi + slack);

        double pm = ps * std::pow(t, 2.0 / m);
        double pM = ps * std::pow(t, 2.0 / M);
        if (have_prev && t > prev_t) {
            mono_m = std::min(mono_m, (pm - prev_pm) / std::max(pm, prev_pm) + slack);
            mono_M = std::min(mono_M, (prev_pM - pM) / std::max(pM, prev_pM) + slack);
        }
        prev_t = t;
        prev_pm = pm;
        prev_pM = pM;
        have_prev = true;
    }
    auto add = [&](const std::string& name, double margin) {
        rep.checks.push_back({name, margin, margin >= 0.0});
    };
    add("varphi_prime_lower", varphi_lo);
    add("varphi_prime_upper", varphi_hi);
    add("psi_prime_lower", psi_lo);
    add("psi_prime_upper", psi_hi);
    add("psi_t_pow_2_over_m_nondecreasing", mono_m);
    add("psi_t_pow_2_over_M_nonincreasing", mono_M);
    rep.f2_ratio_min = f2lo;
    rep.f2_ratio_max = f2hi;
    rep.verdict = f2lo > 0.0 && std::isfinite(f2hi);
    for (const auto& c : rep.checks) rep.verdict = rep.verdict && c.pass;
    return rep;
}

}  // namespace blowup
