#include "reeblab/polyform.hpp"

#include <algorithm>
#include <cmath>

namespace reeblab {

namespace {
uint32_t key_of(const std::array<uint8_t, 4>& e) {
    return (uint32_t(e[0]) << 24) | (uint32_t(e[1]) << 16) | (uint32_t(e[2]) << 8) | uint32_t(e[3]);
}
} // namespace

Poly::Poly(double constant) {
    if (constant != 0.0) terms_.push_back({{0, 0, 0, 0}, constant});
}

Poly Poly::monomial(std::array<uint8_t, 4> e, double c) {
    Poly p;
    if (c != 0.0) p.terms_.push_back({e, c});
    return p;
}

Poly Poly::coordinate(int i) {
    std::array<uint8_t, 4> e{0, 0, 0, 0};
    e[i] = 1;
    return monomial(e, 1.0);
}

double Poly::eval(const Vec4& x) const {
    double s = 0;
    for (const Term& t : terms_) {
        double m = t.c;
        for (int i = 0; i < 4; ++i) {
            double xi = x[i];
            for (int k = 0; k < t.e[i]; ++k) m *= xi;
        }
        s += m;
    }
    return s;
}

Poly Poly::partial(int i) const {
    Poly p;
    for (const Term& t : terms_) {
        if (t.e[i] == 0) continue;
        Term d = t;
        d.c = t.c * t.e[i];
        d.e[i] = uint8_t(t.e[i] - 1);
        p.terms_.push_back(d);
    }
    p.merge();
    return p;
}

Poly Poly::operator+(const Poly& o) const {
    Poly p = *this;
    p.terms_.insert(p.terms_.end(), o.terms_.begin(), o.terms_.end());
    p.merge();
    return p;
}

Poly Poly::operator-(const Poly& o) const { return *this + o * (-1.0); }

Poly Poly::operator*(const Poly& o) const {
    Poly p;
    p.terms_.reserve(terms_.size() * o.terms_.size());
    for (const Term& a : terms_) {
        for (const Term& b : o.terms_) {
            Term t;
            t.c = a.c * b.c;
            for (int i = 0; i < 4; ++i) t.e[i] = uint8_t(a.e[i] + b.e[i]);
            p.terms_.push_back(t);
        }
    }
    p.merge();
    return p;
}

Poly Poly::operator*(double s) const {
    Poly p = *this;
    if (s == 0.0) {
        p.terms_.clear();
        return p;
    }
    for (Term& t : p.terms_) t.c *= s;
    return p;
}

Poly& Poly::operator+=(const Poly& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    merge();
    return *this;
}

Poly Poly::compose_linear(const Mat4& M) const {
    // substitute x_i -> sum_j M[i][j] x_j
    std::array<Poly, 4> lin;
    for (int i = 0; i < 4; ++i) {
        Poly li;
        for (int j = 0; j < 4; ++j) {
            if (M.m[i][j] != 0.0) li += Poly::coordinate(j) * M.m[i][j];
        }
        lin[i] = li;
    }
    Poly out;
    for (const Term& t : terms_) {
        Poly m(t.c);
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < t.e[i]; ++k) m = m * lin[i];
        out += m;
    }
    return out;
}

void Poly::merge() {
    if (terms_.empty()) return;
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& a, const Term& b) { return key_of(a.e) < key_of(b.e); });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const Term& t : terms_) {
        if (!out.empty() && key_of(out.back().e) == key_of(t.e))
            out.back().c += t.c;
        else
            out.push_back(t);
    }
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const Term& t) { return t.c == 0.0; }),
              out.end());
    terms_ = std::move(out);
}

OneForm::OneForm(std::array<Poly, 4> comps) : comp_(std::move(comps)) { build_d(); }

void OneForm::build_d() {
    for (int j = 0; j < 4; ++j)
        for (int k = j + 1; k < 4; ++k)
            dcoef_[j][k] = comp_[k].partial(j) - comp_[j].partial(k);
}

double OneForm::eval(const Vec4& q, const Vec4& v) const {
    double s = 0;
    for (int k = 0; k < 4; ++k)
        if (!comp_[k].empty()) s += comp_[k].eval(q) * v[k];
    return s;
}

double OneForm::d_eval(const Vec4& q, const Vec4& u, const Vec4& v) const {
    double s = 0;
    for (int j = 0; j < 4; ++j)
        for (int k = j + 1; k < 4; ++k) {
            const Poly& c = dcoef_[j][k];
            if (c.empty()) continue;
            s += c.eval(q) * (u[j] * v[k] - u[k] * v[j]);
        }
    return s;
}

OneForm OneForm::operator+(const OneForm& o) const {
    return OneForm({comp_[0] + o.comp_[0], comp_[1] + o.comp_[1],
                    comp_[2] + o.comp_[2], comp_[3] + o.comp_[3]});
}

OneForm OneForm::operator-(const OneForm& o) const {
    return OneForm({comp_[0] - o.comp_[0], comp_[1] - o.comp_[1],
                    comp_[2] - o.comp_[2], comp_[3] - o.comp_[3]});
}

OneForm OneForm::operator*(double s) const {
    return OneForm({comp_[0] * s, comp_[1] * s, comp_[2] * s, comp_[3] * s});
}

OneForm OneForm::scaled_by(const Poly& f) const {
    return OneForm({f * comp_[0], f * comp_[1], f * comp_[2], f * comp_[3]});
}

OneForm OneForm::pullback_linear(const Mat4& M) const {
    // (M^* omega)_j = sum_k M[k][j] * (P_k o M)
    std::array<Poly, 4> out;
    std::array<Poly, 4> composed;
    for (int k = 0; k < 4; ++k) composed[k] = comp_[k].compose_linear(M);
    for (int j = 0; j < 4; ++j) {
        Poly pj;
        for (int k = 0; k < 4; ++k)
            if (M.m[k][j] != 0.0) pj += composed[k] * M.m[k][j];
        out[j] = pj;
    }
    return OneForm(out);
}

OneForm exterior_derivative(const Poly& h) {
    return OneForm({h.partial(0), h.partial(1), h.partial(2), h.partial(3)});
}

OneForm standard_zoll_oneform() {
    const double c = 1.0 / kTwoPi;
    std::array<Poly, 4> comps;
    comps[0] = Poly::coordinate(1) * (-c);
    comps[1] = Poly::coordinate(0) * c;
    comps[2] = Poly::coordinate(3) * (-c);
    comps[3] = Poly::coordinate(2) * c;
    return OneForm(comps);
}

} // namespace reeblab
