#include "ellreg/cases.hpp"

#include <cmath>

#include "ellreg/error.hpp"
#include "ellreg/fixtures.hpp"

namespace ellreg {

namespace {

double window(double x) { return soft_plateau(std::abs(x), 1.6, 0.17); }
double sign(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

template <class Fn>
Field line(const GridSpec& g, Fn fn) {
    return Field::sample(g, [fn](std::span<const double> x) { return cplx(fn(x[0])); });
}

} // namespace

const std::vector<std::string>& convergence_case_names() {
    static const std::vector<std::string> names{"order-0", "order-1", "order-2-regular", "order-2-rough"};
    return names;
}

ConvergenceCase convergence_case(const std::string& name, const GridSpec& g) {
    if (g.dim != 1) throw InvalidArgument("convergence_case: fixtures are one-dimensional");
    if (name == "order-0") {
        const Field c = line(g, [](double x) { return 2.0 + std::sin(x); });
        const Field f = line(g, [](double x) { return (x > 0 ? 1.0 : (x < 0 ? 0.0 : 0.5)) * window(x); });
        return {"order-0 step", PDOperator::multiplication(c), f, f.times(c)};
    }
    if (name == "order-1")
        return {"order-1 kink", PDOperator::derivative(g, MultiIndex({1})),
                line(g, [](double x) { return std::abs(x) * window(x); }), line(g, sign)};
    if (name == "order-2-regular")
        return {"order-2 x|x|", PDOperator::derivative(g, MultiIndex({2})),
                line(g, [](double x) { return x * std::abs(x) * window(x); }),
                line(g, [](double x) { return 2.0 * sign(x); })};
    if (name == "order-2-rough")
        return {"order-2 sign", PDOperator::derivative(g, MultiIndex({2})),
                line(g, [](double x) { return sign(x) * window(x); }), Field(g, 1)};
    throw InvalidArgument("convergence_case: unknown fixture '" + name + "'");
}

Box convergence_window(const GridSpec& g) { return Box::cube(g.dim, g.half_period / 4.0); }

Field windowed_quartic(const GridSpec& g) {
    if (g.dim > 2) throw InvalidArgument("windowed_quartic: dimension must be 1 or 2");
    return Field::sample(g, [](std::span<const double> x) {
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        const double poly = x.size() == 1 ? std::pow(x[0], 4) : std::pow(x[0], 4) + x[0] * std::pow(x[1], 3);
        return cplx(poly * soft_plateau(std::sqrt(r2), 1.6, 0.17));
    });
}

} // namespace ellreg
