#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "ellreg/pdo.hpp"

namespace ellreg::io {

/// Closed-form coefficient expression over grid coordinates.
///
/// Grammar: numbers, `x` (first coordinate), `x1`..`xm`, `pi`, `i`,
/// `sin`/`cos`/`exp`/`log`/`abs` calls, parentheses, unary minus, `+ - * /`
/// and `^` with an integer exponent.
class Expression {
public:
    explicit Expression(const std::string& text);
    ~Expression();
    Expression(Expression&&) noexcept;
    Expression& operator=(Expression&&) noexcept;

    cplx operator()(std::span<const double> x) const;
    Field sample(const GridSpec& grid) const;
    const std::string& text() const { return text_; }

    struct Node;

private:
    std::string text_;
    std::unique_ptr<Node> root_;
};

/// Operator description:
///   {"order": n, "channels": l | [in, out], "degenerate": bool?,
///    "entries": [{"alpha": [..], "coeff": C}, ...]}
/// where C is a number or expression string (scalar times identity),
/// {"matrix": [[e, ...], ...]} with e a number, [re, im] or expression, or
/// {"field": "path"} naming a stored field with out*in channels. Relative
/// paths resolve against `base`.
PDOperator operator_from_json(const nlohmann::json& j, const GridSpec& grid, const std::filesystem::path& base = {});
PDOperator load_operator(const std::filesystem::path& path, const GridSpec& grid);

} // namespace ellreg::io
