#include "ellreg/operator_io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>

#include "ellreg/error.hpp"
#include "ellreg/field_io.hpp"

namespace ellreg::io {

struct Expression::Node {
    enum class Kind { Number, Coordinate, Unary, Binary, Call, Power } kind;
    cplx value{};
    int axis = 0;
    char op = 0;
    int exponent = 0;
    std::string function;
    std::unique_ptr<Node> lhs, rhs;

    cplx eval(std::span<const double> x) const {
        switch (kind) {
        case Kind::Number: return value;
        case Kind::Coordinate:
            if (axis >= static_cast<int>(x.size())) throw InvalidArgument("expression uses a coordinate beyond the grid dimension");
            return x[axis];
        case Kind::Unary: return -lhs->eval(x);
        case Kind::Power: {
            const cplx b = lhs->eval(x);
            cplx r = 1.0;
            for (int k = 0; k < std::abs(exponent); ++k) r *= b;
            return exponent < 0 ? 1.0 / r : r;
        }
        case Kind::Binary: {
            const cplx a = lhs->eval(x), b = rhs->eval(x);
            switch (op) {
            case '+': return a + b;
            case '-': return a - b;
            case '*': return a * b;
            default: return a / b;
            }
        }
        case Kind::Call: {
            const cplx a = lhs->eval(x);
            if (function == "sin") return std::sin(a);
            if (function == "cos") return std::cos(a);
            if (function == "exp") return std::exp(a);
            if (function == "log") return std::log(a);
            return std::abs(a);
        }
        }
        return {};
    }
};

namespace {

using Node = Expression::Node;

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    std::unique_ptr<Node> parse() {
        auto n = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw FormatError("coefficient expression '" + s_ + "': " + why + " at offset " + std::to_string(pos_));
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static std::unique_ptr<Node> binary(char op, std::unique_ptr<Node> a, std::unique_ptr<Node> b) {
        auto n = std::make_unique<Node>();
        n->kind = Node::Kind::Binary;
        n->op = op;
        n->lhs = std::move(a);
        n->rhs = std::move(b);
        return n;
    }

    std::unique_ptr<Node> expr() {
        auto n = term();
        for (;;) {
            if (accept('+')) n = binary('+', std::move(n), term());
            else if (accept('-')) n = binary('-', std::move(n), term());
            else return n;
        }
    }

    std::unique_ptr<Node> term() {
        auto n = unary();
        for (;;) {
            if (accept('*')) n = binary('*', std::move(n), unary());
            else if (accept('/')) n = binary('/', std::move(n), unary());
            else return n;
        }
    }

    std::unique_ptr<Node> unary() {
        if (accept('-')) {
            auto n = std::make_unique<Node>();
            n->kind = Node::Kind::Unary;
            n->lhs = unary();
            return n;
        }
        accept('+');
        return power();
    }

    std::unique_ptr<Node> power() {
        auto base = primary();
        if (!accept('^')) return base;
        skip();
        bool neg = accept('-');
        skip();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("expected an integer exponent");
        auto n = std::make_unique<Node>();
        n->kind = Node::Kind::Power;
        n->exponent = std::stoi(s_.substr(start, pos_ - start)) * (neg ? -1 : 1);
        n->lhs = std::move(base);
        return n;
    }

    std::unique_ptr<Node> primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        if (accept('(')) {
            auto n = expr();
            if (!accept(')')) fail("expected ')'");
            return n;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            const double v = std::stod(s_.substr(pos_), &used);
            pos_ += used;
            auto n = std::make_unique<Node>();
            n->kind = Node::Kind::Number;
            n->value = v;
            return n;
        }
        if (!std::isalpha(static_cast<unsigned char>(c))) fail("unexpected character");
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        const std::string word = s_.substr(start, pos_ - start);
        auto n = std::make_unique<Node>();
        if (word == "x") {
            n->kind = Node::Kind::Coordinate;
        } else if (word.size() > 1 && word[0] == 'x' &&
                   word.find_first_not_of("0123456789", 1) == std::string::npos) {
            n->kind = Node::Kind::Coordinate;
            n->axis = std::stoi(word.substr(1)) - 1;
            if (n->axis < 0) fail("coordinates are numbered from x1");
        } else if (word == "pi") {
            n->kind = Node::Kind::Number;
            n->value = kPi;
        } else if (word == "i") {
            n->kind = Node::Kind::Number;
            n->value = cplx(0.0, 1.0);
        } else if (word == "sin" || word == "cos" || word == "exp" || word == "log" || word == "abs") {
            n->kind = Node::Kind::Call;
            n->function = word;
            if (!accept('(')) fail("expected '(' after " + word);
            n->lhs = expr();
            if (!accept(')')) fail("expected ')'");
        } else {
            fail("unknown name '" + word + "'");
        }
        return n;
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

cplx json_scalar(const nlohmann::json& e, std::span<const double> x, const Expression* expr) {
    if (expr) return (*expr)(x);
    if (e.is_number()) return e.get<double>();
    return {e.at(0).get<double>(), e.at(1).get<double>()};
}

Field coefficient_field(const nlohmann::json& c, const GridSpec& grid, int in, int out,
                        const std::filesystem::path& base) {
    if (c.is_number() || c.is_string()) {
        Field s = c.is_number() ? Field::constant(grid, 1, c.get<double>()) : Expression(c.get<std::string>()).sample(grid);
        Field m(grid, in * out);
        if (in != out) throw ChannelMismatch("scalar coefficient needs a square operator");
        for (std::size_t p = 0; p < grid.size(); ++p)
            for (int i = 0; i < out; ++i) m.at(p, i * in + i) = s.at(p);
        return m;
    }
    if (!c.is_object()) throw FormatError("coefficient must be a number, expression, matrix or field reference");
    if (c.contains("field")) {
        std::filesystem::path p = c.at("field").get<std::string>();
        if (p.is_relative()) p = base / p;
        Field f = load(p);
        require_same_grid(grid, f.grid(), "coefficient field");
        if (f.channels() != in * out) throw ChannelMismatch("coefficient field " + p.string() + " has the wrong channel count");
        return f;
    }
    if (c.contains("matrix")) {
        const auto& rows = c.at("matrix");
        if (!rows.is_array() || static_cast<int>(rows.size()) != out) throw FormatError("matrix must have out_channels rows");
        Field m(grid, in * out);
        for (int i = 0; i < out; ++i) {
            if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != in)
                throw FormatError("matrix rows must have in_channels entries");
            for (int j = 0; j < in; ++j) {
                const auto& e = rows[i][j];
                std::unique_ptr<Expression> ex;
                if (e.is_string()) ex = std::make_unique<Expression>(e.get<std::string>());
                else if (!e.is_number() && !(e.is_array() && e.size() == 2)) throw FormatError("bad matrix entry");
                std::vector<double> x(grid.dim);
                for (std::size_t p = 0; p < grid.size(); ++p) {
                    x = grid.point(p);
                    m.at(p, i * in + j) = json_scalar(e, x, ex.get());
                }
            }
        }
        return m;
    }
    throw FormatError("coefficient object needs a 'matrix' or 'field' key");
}

} // namespace

Expression::Expression(const std::string& text) : text_(text), root_(Parser(text_).parse()) {}
Expression::~Expression() = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;

cplx Expression::operator()(std::span<const double> x) const { return root_->eval(x); }

Field Expression::sample(const GridSpec& grid) const {
    Field f = Field::sample(grid, [this](std::span<const double> x) { return (*this)(x); });
    if (!f.all_finite()) throw InvalidArgument("expression '" + text_ + "' is not finite on the grid");
    return f;
}

PDOperator operator_from_json(const nlohmann::json& j, const GridSpec& grid, const std::filesystem::path& base) {
    try {
        for (const auto& [key, v] : j.items())
            if (key != "order" && key != "channels" && key != "degenerate" && key != "entries")
                throw FormatError("unknown operator key '" + key + "'");
        const int order = j.at("order").get<int>();
        int in = 1, out = 1;
        if (j.contains("channels")) {
            const auto& ch = j.at("channels");
            if (ch.is_array()) {
                in = ch.at(0).get<int>();
                out = ch.at(1).get<int>();
            } else {
                in = out = ch.get<int>();
            }
        }
        PDOperator P(grid, order, in, out);
        for (const auto& e : j.at("entries")) {
            for (const auto& [key, v] : e.items())
                if (key != "alpha" && key != "coeff") throw FormatError("unknown entry key '" + key + "'");
            MultiIndex alpha(e.at("alpha").get<std::vector<int>>());
            if (alpha.dim() != grid.dim) throw FormatError("alpha length does not match the grid dimension");
            if (std::any_of(alpha.e.begin(), alpha.e.end(), [](int v) { return v < 0; }))
                throw FormatError("alpha entries must be nonnegative");
            P.add(alpha, coefficient_field(e.at("coeff"), grid, in, out, base));
        }
        P.set_degenerate_order(j.value("degenerate", false));
        P.validate();
        return P;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("operator description: ") + e.what());
    }
}

PDOperator load_operator(const std::filesystem::path& path, const GridSpec& grid) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open operator file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("operator file " + path.string() + ": " + e.what());
    }
    return operator_from_json(j, grid, path.parent_path());
}

} // namespace ellreg::io
