#include "mirs/coefficient.hpp"

#include "mirs/errors.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace mirs {

Monomial::Monomial(std::vector<std::pair<std::string, int>> factors)
{
    std::sort(factors.begin(), factors.end());
    for (auto& [name, power] : factors) {
        if (power < 0) {
            throw ValidationError("negative power in monomial");
        }
        if (power == 0) {
            continue;
        }
        if (!f_.empty() && f_.back().first == name) {
            f_.back().second += power;
        } else {
            f_.emplace_back(std::move(name), power);
        }
    }
}

Monomial Monomial::symbol(std::string name, int power)
{
    return Monomial({{std::move(name), power}});
}

int Monomial::degree() const
{
    int s = 0;
    for (const auto& [name, p] : f_) {
        s += p;
    }
    return s;
}

int Monomial::power_of(const std::string& name) const
{
    for (const auto& [n, p] : f_) {
        if (n == name) {
            return p;
        }
    }
    return 0;
}

Monomial Monomial::operator*(const Monomial& o) const
{
    Monomial out;
    out.f_.reserve(f_.size() + o.f_.size());
    auto i = f_.begin();
    auto j = o.f_.begin();
    while (i != f_.end() || j != o.f_.end()) {
        if (j == o.f_.end() || (i != f_.end() && i->first < j->first)) {
            out.f_.push_back(*i++);
        } else if (i == f_.end() || j->first < i->first) {
            out.f_.push_back(*j++);
        } else {
            out.f_.emplace_back(i->first, i->second + j->second);
            ++i;
            ++j;
        }
    }
    return out;
}

std::string Monomial::to_string() const
{
    if (f_.empty()) {
        return "1";
    }
    std::string out;
    for (const auto& [name, p] : f_) {
        if (!out.empty()) {
            out += "*";
        }
        out += p == 1 ? name : fmt::format("{}^{}", name, p);
    }
    return out;
}

Coefficient::Coefficient(const Rational& c)
{
    add_term(Monomial(), c);
}

Coefficient Coefficient::symbol(const std::string& name, int power)
{
    return term(Monomial::symbol(name, power), Rational(1));
}

Coefficient Coefficient::term(const Monomial& m, const Rational& c)
{
    Coefficient out;
    out.add_term(m, c);
    return out;
}

void Coefficient::add_term(const Monomial& m, const Rational& c)
{
    if (c == 0) {
        return;
    }
    auto [it, inserted] = t_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) {
            t_.erase(it);
        }
    }
}

bool Coefficient::is_constant() const
{
    return t_.empty() || (t_.size() == 1 && t_.begin()->first.is_one());
}

Rational Coefficient::constant_term() const
{
    auto it = t_.find(Monomial());
    return it == t_.end() ? Rational(0) : it->second;
}

std::set<std::string> Coefficient::symbols() const
{
    std::set<std::string> out;
    for (const auto& [m, c] : t_) {
        for (const auto& [name, p] : m.factors()) {
            out.insert(name);
        }
    }
    return out;
}

Coefficient& Coefficient::operator+=(const Coefficient& o)
{
    for (const auto& [m, c] : o.t_) {
        add_term(m, c);
    }
    return *this;
}

Coefficient& Coefficient::operator-=(const Coefficient& o)
{
    for (const auto& [m, c] : o.t_) {
        add_term(m, -c);
    }
    return *this;
}

Coefficient operator*(const Coefficient& a, const Coefficient& b)
{
    Coefficient out;
    for (const auto& [ma, ca] : a.t_) {
        for (const auto& [mb, cb] : b.t_) {
            out.add_term(ma * mb, ca * cb);
        }
    }
    return out;
}

Coefficient& Coefficient::operator*=(const Coefficient& o)
{
    *this = *this * o;
    return *this;
}

Coefficient& Coefficient::operator*=(const Rational& s)
{
    if (s == 0) {
        t_.clear();
        return *this;
    }
    for (auto& [m, c] : t_) {
        c *= s;
    }
    return *this;
}

Coefficient Coefficient::operator-() const
{
    Coefficient out(*this);
    out *= Rational(-1);
    return out;
}

Coefficient Coefficient::pow(int e) const
{
    if (e < 0) {
        throw ValidationError("negative power of a coefficient");
    }
    Coefficient out(Rational(1));
    Coefficient base(*this);
    while (e > 0) {
        if (e & 1) {
            out *= base;
        }
        e >>= 1;
        if (e > 0) {
            base = base * base;
        }
    }
    return out;
}

Coefficient Coefficient::substitute(const std::map<std::string, Coefficient>& images) const
{
    Coefficient out;
    for (const auto& [m, c] : t_) {
        std::vector<std::pair<std::string, int>> kept;
        Coefficient factor(c);
        for (const auto& [name, p] : m.factors()) {
            auto it = images.find(name);
            if (it == images.end()) {
                kept.emplace_back(name, p);
            } else {
                factor *= it->second.pow(p);
            }
        }
        out += factor * Coefficient::term(Monomial(std::move(kept)), Rational(1));
    }
    return out;
}

Rational Coefficient::evaluate(const std::map<std::string, Rational>& values) const
{
    Rational out = 0;
    for (const auto& [m, c] : t_) {
        Rational v = c;
        for (const auto& [name, p] : m.factors()) {
            auto it = values.find(name);
            if (it == values.end()) {
                throw ValidationError(fmt::format("no value for symbol {}", name));
            }
            v *= mirs::pow(it->second, p);
        }
        out += v;
    }
    return out;
}

std::string Coefficient::to_string() const
{
    if (t_.empty()) {
        return "0";
    }
    std::string out;
    for (const auto& [m, c] : t_) {
        const bool negative = c < 0;
        const Rational mag = abs(c);
        if (out.empty()) {
            out += negative ? "-" : "";
        } else {
            out += negative ? " - " : " + ";
        }
        if (m.is_one()) {
            out += mirs::to_string(mag);
        } else if (mag == 1) {
            out += m.to_string();
        } else {
            out += mirs::to_string(mag) + "*" + m.to_string();
        }
    }
    return out;
}

} // namespace mirs
