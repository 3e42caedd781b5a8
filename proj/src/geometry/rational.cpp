#include "cbar/rational.hpp"

#include "cbar/errors.hpp"

#include <cctype>
#include <string>

namespace cbar {

Rational frac(long numerator, long denominator)
{
    Rational r(numerator, denominator);
    r.canonicalize();
    return r;
}

namespace {

bool all_digits(std::string_view s)
{
    if (s.empty())
        return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            return false;
    return true;
}

mpz_class parse_integer(std::string_view s, std::string_view whole)
{
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (!all_digits(s))
        throw ParseError("malformed rational '" + std::string(whole) + "'");
    mpz_class z(std::string(s), 10);
    return negative ? mpz_class(-z) : z;
}

}  // namespace

Rational parse_rational(std::string_view text)
{
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    if (text.empty())
        throw ParseError("empty rational");

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        mpz_class num = parse_integer(text.substr(0, slash), text);
        std::string_view den_text = text.substr(slash + 1);
        if (!all_digits(den_text))
            throw ParseError("malformed denominator in '" + std::string(text) + "'");
        mpz_class den(std::string(den_text), 10);
        if (den == 0)
            throw ParseError("zero denominator in '" + std::string(text) + "'");
        Rational r(num, den);
        r.canonicalize();
        return r;
    }

    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view int_part = text.substr(0, dot);
        std::string_view frac_part = text.substr(dot + 1);
        bool negative = !int_part.empty() && int_part.front() == '-';
        if (!int_part.empty() && (int_part.front() == '-' || int_part.front() == '+'))
            int_part.remove_prefix(1);
        if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part)) ||
            (int_part.empty() && frac_part.empty()))
            throw ParseError("malformed decimal '" + std::string(text) + "'");
        mpz_class whole = int_part.empty() ? mpz_class(0) : mpz_class(std::string(int_part), 10);
        mpz_class digits = frac_part.empty() ? mpz_class(0) : mpz_class(std::string(frac_part), 10);
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac_part.size());
        Rational r(whole * scale + digits, scale);
        r.canonicalize();
        return negative ? Rational(-r) : r;
    }

    return Rational(parse_integer(text, text));
}

std::string to_string(const Rational& value)
{
    return value.get_str();
}

std::string to_string(const Vec& values)
{
    std::string out = "(";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            out += ", ";
        out += values[i].get_str();
    }
    return out + ")";
}

Rational dot(const Vec& a, const Vec& b)
{
    if (a.size() != b.size())
        throw DimensionMismatch("dot product of vectors with different lengths");
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (sgn(a[i]) != 0)
            s += a[i] * b[i];
    return s;
}

Vec zeros(std::size_t n)
{
    return Vec(n, Rational(0));
}

Mat identity(std::size_t n)
{
    Mat m(n, zeros(n));
    for (std::size_t i = 0; i < n; ++i)
        m[i][i] = 1;
    return m;
}

Vec mat_vec(const Mat& a, const Vec& x)
{
    Vec y;
    y.reserve(a.size());
    for (const auto& row : a)
        y.push_back(dot(row, x));
    return y;
}

Mat mat_mul(const Mat& a, const Mat& b)
{
    if (a.empty())
        return {};
    std::size_t inner = b.size();
    std::size_t cols = b.empty() ? 0 : b.front().size();
    Mat out(a.size(), zeros(cols));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != inner)
            throw DimensionMismatch("matrix product with incompatible shapes");
        for (std::size_t k = 0; k < inner; ++k) {
            if (sgn(a[i][k]) == 0)
                continue;
            for (std::size_t j = 0; j < cols; ++j)
                out[i][j] += a[i][k] * b[k][j];
        }
    }
    return out;
}

Rational floor_of(const Rational& value)
{
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
    return Rational(q);
}

Rational ceil_of(const Rational& value)
{
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
    return Rational(q);
}

std::vector<std::size_t> row_reduce(Mat& m)
{
    std::vector<std::size_t> pivots;
    if (m.empty())
        return pivots;
    const std::size_t cols = m.front().size();
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < m.size(); ++col) {
        std::size_t p = rank;
        while (p < m.size() && sgn(m[p][col]) == 0)
            ++p;
        if (p == m.size())
            continue;
        std::swap(m[p], m[rank]);
        const Rational inv = 1 / m[rank][col];
        for (std::size_t j = col; j < cols; ++j)
            m[rank][j] *= inv;
        for (std::size_t r = 0; r < m.size(); ++r) {
            if (r == rank || sgn(m[r][col]) == 0)
                continue;
            const Rational f = m[r][col];
            for (std::size_t j = col; j < cols; ++j)
                if (sgn(m[rank][j]) != 0)
                    m[r][j] -= f * m[rank][j];
        }
        pivots.push_back(col);
        ++rank;
    }
    return pivots;
}

void make_primitive(Vec& v)
{
    mpz_class l = 1;
    for (const auto& x : v)
        if (sgn(x) != 0)
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    mpz_class g = 0;
    for (auto& x : v) {
        x *= l;
        if (sgn(x) != 0)
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_num_mpz_t());
    }
    if (g > 1)
        for (auto& x : v)
            x /= g;
}

}  // namespace cbar
