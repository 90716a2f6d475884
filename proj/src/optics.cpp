#include "qfhe/optics.hpp"

#include <algorithm>
#include <cmath>

namespace qfhe::optics {

namespace {

using Key = std::uint64_t;

std::array<std::uint8_t, kMaxPhotons> decode(Key k) {
    std::array<std::uint8_t, kMaxPhotons> photons{};
    for (int i = 0; i < kMaxPhotons; ++i)
        photons[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((k >> (8 * i)) & 0xff);
    return photons;  // entries are mode_id + 1, zero for empty slots
}

int photon_count(const std::array<std::uint8_t, kMaxPhotons>& p) {
    int n = 0;
    for (auto v : p)
        if (v) ++n;
    return n;
}

Key encode(std::array<std::uint8_t, kMaxPhotons> p) {
    // descending, so occupied slots come first and empty (0) slots trail
    std::sort(p.rbegin(), p.rend());
    Key k = 0;
    for (int i = 0; i < kMaxPhotons; ++i)
        k |= static_cast<Key>(p[static_cast<std::size_t>(i)]) << (8 * i);
    return k;
}

// product of n_m! over mode occupancies of the (sorted or unsorted) multiset
double fact_product(const std::array<std::uint8_t, kMaxPhotons>& p) {
    std::array<std::uint8_t, kMaxPhotons> s = p;
    std::sort(s.begin(), s.end());
    double f = 1.0;
    int run = 1;
    for (int i = 1; i < kMaxPhotons; ++i) {
        if (s[static_cast<std::size_t>(i)] != 0 &&
            s[static_cast<std::size_t>(i)] == s[static_cast<std::size_t>(i - 1)]) {
            ++run;
            f *= run;
        } else {
            run = 1;
        }
    }
    return f;
}

constexpr double kAmpTol = 1e-14;

}  // namespace

FockState FockState::vacuum() {
    FockState s;
    s.terms_[0] = 1.0;
    return s;
}

void FockState::create_photon(int rail, const Vec& pol_amps, const Vec& label_amps) {
    if (pol_amps.size() != 2) throw DimensionError("pol_amps must have two entries");
    if (label_amps.size() < 1 || label_amps.size() > kLabels)
        throw DimensionError("label_amps length out of range");
    std::map<Key, Complex> out;
    for (const auto& [key, amp] : terms_) {
        auto photons = decode(key);
        const int n = photon_count(photons);
        if (n >= kMaxPhotons) throw DimensionError("photon number overflow");
        for (int pol = 0; pol < 2; ++pol) {
            if (std::abs(pol_amps(pol)) < kAmpTol) continue;
            for (Eigen::Index l = 0; l < label_amps.size(); ++l) {
                if (std::abs(label_amps(l)) < kAmpTol) continue;
                const std::uint8_t m = mode_id(rail, pol, static_cast<int>(l));
                auto np = photons;
                np[static_cast<std::size_t>(n)] = static_cast<std::uint8_t>(m + 1);
                // a^dag on occupancy n_m contributes sqrt(n_m + 1)
                int occ = 0;
                for (int i = 0; i < n; ++i)
                    if (photons[static_cast<std::size_t>(i)] == m + 1) ++occ;
                out[encode(np)] +=
                    amp * pol_amps(pol) * label_amps(l) * std::sqrt(static_cast<double>(occ + 1));
            }
        }
    }
    terms_ = std::move(out);
}

double FockState::norm_sq() const {
    double n = 0;
    for (const auto& [key, amp] : terms_) n += std::norm(amp);
    return n;
}

Complex FockState::amplitude(const std::vector<std::uint8_t>& photon_modes) const {
    std::array<std::uint8_t, kMaxPhotons> p{};
    if (photon_modes.size() > kMaxPhotons) throw DimensionError("too many photons");
    for (std::size_t i = 0; i < photon_modes.size(); ++i)
        p[i] = static_cast<std::uint8_t>(photon_modes[i] + 1);
    auto it = terms_.find(encode(p));
    return it == terms_.end() ? Complex(0, 0) : it->second;
}

void FockState::apply_mode_unitary(const std::vector<std::uint8_t>& modes, const Mat& u) {
    const int k = static_cast<int>(modes.size());
    if (u.rows() != k || u.cols() != k) throw DimensionError("mode unitary shape mismatch");

    std::map<Key, Complex> poly;  // monomial coefficients of the result
    for (const auto& [key, amp] : terms_) {
        auto photons = decode(key);
        const int n = photon_count(photons);
        const Complex coeff = amp / std::sqrt(fact_product(photons));

        // expand the substitution product photon by photon
        struct Partial {
            std::array<std::uint8_t, kMaxPhotons> modes_so_far;
            Complex factor;
        };
        std::vector<Partial> partials{{std::array<std::uint8_t, kMaxPhotons>{}, coeff}};
        for (int i = 0; i < n; ++i) {
            const std::uint8_t m = static_cast<std::uint8_t>(photons[static_cast<std::size_t>(i)] - 1);
            int j = -1;
            for (int c = 0; c < k; ++c)
                if (modes[static_cast<std::size_t>(c)] == m) j = c;
            std::vector<Partial> next;
            next.reserve(partials.size() * (j < 0 ? 1 : static_cast<std::size_t>(k)));
            for (const Partial& part : partials) {
                if (j < 0) {
                    Partial p2 = part;
                    p2.modes_so_far[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(m + 1);
                    next.push_back(p2);
                    continue;
                }
                for (int r = 0; r < k; ++r) {
                    const Complex f = u(r, j);
                    if (std::abs(f) < kAmpTol) continue;
                    Partial p2 = part;
                    p2.factor *= f;
                    p2.modes_so_far[static_cast<std::size_t>(i)] =
                        static_cast<std::uint8_t>(modes[static_cast<std::size_t>(r)] + 1);
                    next.push_back(p2);
                }
            }
            partials = std::move(next);
        }
        for (const Partial& part : partials) poly[encode(part.modes_so_far)] += part.factor;
    }

    terms_.clear();
    for (auto& [key, c] : poly) {
        if (std::abs(c) < kAmpTol) continue;
        terms_[key] = c * std::sqrt(fact_product(decode(key)));
    }
}

double FockState::post_select(const std::vector<int>& one_photon_rails,
                              const std::vector<int>& empty_rails) {
    std::map<Key, Complex> kept;
    double p = 0;
    for (const auto& [key, amp] : terms_) {
        auto photons = decode(key);
        bool ok = true;
        for (int rail : one_photon_rails) {
            int cnt = 0;
            for (auto v : photons)
                if (v && mode_rail(static_cast<std::uint8_t>(v - 1)) == rail) ++cnt;
            if (cnt != 1) { ok = false; break; }
        }
        if (ok)
            for (int rail : empty_rails) {
                for (auto v : photons)
                    if (v && mode_rail(static_cast<std::uint8_t>(v - 1)) == rail) { ok = false; break; }
                if (!ok) break;
            }
        if (!ok) continue;
        p += std::norm(amp);
        kept[key] = amp;
    }
    if (p < 1e-14) {
        terms_.clear();
        terms_[0] = 1.0;
        return 0.0;
    }
    const double inv = 1.0 / std::sqrt(p);
    for (auto& [key, amp] : kept) amp *= inv;
    terms_ = std::move(kept);
    return p;
}

std::array<std::pair<double, FockState>, 2> FockState::measure_polarization(int rail) const {
    std::array<std::pair<double, FockState>, 2> out{
        std::pair<double, FockState>{0.0, FockState::vacuum()},
        std::pair<double, FockState>{0.0, FockState::vacuum()}};
    std::array<std::map<Key, Complex>, 2> parts;
    for (const auto& [key, amp] : terms_) {
        auto photons = decode(key);
        int pol = -1, cnt = 0;
        for (auto v : photons)
            if (v && mode_rail(static_cast<std::uint8_t>(v - 1)) == rail) {
                ++cnt;
                pol = mode_pol(static_cast<std::uint8_t>(v - 1));
            }
        if (cnt != 1)
            throw DimensionError("measure_polarization requires exactly one photon in the rail");
        parts[static_cast<std::size_t>(pol)][key] = amp;
        out[static_cast<std::size_t>(pol)].first += std::norm(amp);
    }
    for (int pol = 0; pol < 2; ++pol) {
        auto& [p, st] = out[static_cast<std::size_t>(pol)];
        if (p < 1e-14) continue;
        st.terms_.clear();
        const double inv = 1.0 / std::sqrt(p);
        for (auto& [key, amp] : parts[static_cast<std::size_t>(pol)]) st.terms_[key] = amp * inv;
    }
    return out;
}

Eigen::Matrix2cd FockState::polarization_density(int rail) const {
    // group amplitudes by everything except the rail photon's polarization
    std::map<Key, Eigen::Vector2cd> groups;
    for (const auto& [key, amp] : terms_) {
        auto photons = decode(key);
        int idx = -1, cnt = 0;
        for (int i = 0; i < kMaxPhotons; ++i) {
            auto v = photons[static_cast<std::size_t>(i)];
            if (v && mode_rail(static_cast<std::uint8_t>(v - 1)) == rail) {
                ++cnt;
                idx = i;
            }
        }
        if (cnt != 1)
            throw DimensionError("polarization_density requires exactly one photon in the rail");
        const std::uint8_t m = static_cast<std::uint8_t>(photons[static_cast<std::size_t>(idx)] - 1);
        const int pol = mode_pol(m);
        auto rest = photons;
        rest[static_cast<std::size_t>(idx)] =
            static_cast<std::uint8_t>(mode_id(rail, 0, mode_label(m)) + 1);
        auto [it, inserted] = groups.try_emplace(encode(rest), Eigen::Vector2cd::Zero());
        it->second(pol) += amp;
    }
    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
    for (const auto& [key, v] : groups) rho += v * v.adjoint();
    return rho;
}

namespace {

Mat rotation2(double cos_t) {
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    Mat m(2, 2);
    m << cos_t, -sin_t, sin_t, cos_t;
    return m;
}

void apply_two_mode_all_labels(FockState& s, int rail_a, int rail_b, int pol, const Mat& u) {
    for (int l = 0; l < kLabels; ++l)
        s.apply_mode_unitary({mode_id(rail_a, pol, l), mode_id(rail_b, pol, l)}, u);
}

void apply_jones(FockState& s, int rail, const Eigen::Matrix2cd& j) {
    Mat u = j;
    for (int l = 0; l < kLabels; ++l)
        s.apply_mode_unitary({mode_id(rail, 0, l), mode_id(rail, 1, l)}, u);
}

}  // namespace

OpticalElement OpticalElement::bs(double transmission, int rail_a, int rail_b) {
    OpticalElement e{Kind::BS};
    e.param = transmission;
    e.rail_a = rail_a;
    e.rail_b = rail_b;
    return e;
}
OpticalElement OpticalElement::ppbs(double t_v, int rail_a, int rail_b) {
    OpticalElement e{Kind::PPBS};
    e.param = t_v;
    e.rail_a = rail_a;
    e.rail_b = rail_b;
    return e;
}
OpticalElement OpticalElement::pbs(int rail_a, int rail_b) {
    OpticalElement e{Kind::PBS};
    e.rail_a = rail_a;
    e.rail_b = rail_b;
    return e;
}
OpticalElement OpticalElement::hwp(double theta, int rail) {
    OpticalElement e{Kind::HWP};
    e.param = theta;
    e.rail_a = rail;
    return e;
}
OpticalElement OpticalElement::qwp(double theta, int rail) {
    OpticalElement e{Kind::QWP};
    e.param = theta;
    e.rail_a = rail;
    return e;
}
OpticalElement OpticalElement::phase(double phi, int rail) {
    OpticalElement e{Kind::Phase};
    e.param = phi;
    e.rail_a = rail;
    return e;
}
OpticalElement OpticalElement::attenuator(double t, int rail, int pol, int loss_rail) {
    OpticalElement e{Kind::Attenuator};
    e.param = t;
    e.rail_a = rail;
    e.pol = pol;
    e.loss_rail = loss_rail;
    return e;
}
OpticalElement OpticalElement::pol_unitary(const Eigen::Matrix2cd& u, int rail) {
    OpticalElement e{Kind::PolUnitary};
    e.jones = u;
    e.rail_a = rail;
    return e;
}
OpticalElement OpticalElement::label_mix(double visibility, int rail, int from_label, int to_label) {
    OpticalElement e{Kind::LabelMix};
    e.param = visibility;
    e.rail_a = rail;
    e.from_label = from_label;
    e.to_label = to_label;
    return e;
}

FockState apply_element(FockState state, const OpticalElement& e) {
    using Kind = OpticalElement::Kind;
    switch (e.kind) {
        case Kind::BS: {
            const Mat u = rotation2(std::sqrt(e.param));
            for (int pol = 0; pol < 2; ++pol)
                apply_two_mode_all_labels(state, e.rail_a, e.rail_b, pol, u);
            return state;
        }
        case Kind::PPBS: {
            // horizontal fully transmitted; vertical mixed
            apply_two_mode_all_labels(state, e.rail_a, e.rail_b, 1, rotation2(std::sqrt(e.param)));
            return state;
        }
        case Kind::PBS: {
            apply_two_mode_all_labels(state, e.rail_a, e.rail_b, 1, rotation2(0.0));
            return state;
        }
        case Kind::HWP: {
            const double c = std::cos(2 * e.param), s = std::sin(2 * e.param);
            Eigen::Matrix2cd j;
            j << c, s, s, -c;
            apply_jones(state, e.rail_a, j);
            return state;
        }
        case Kind::QWP: {
            const Complex i(0, 1);
            const double c = std::cos(e.param), s = std::sin(e.param);
            Eigen::Matrix2cd j;
            j << c * c + i * s * s, (1.0 - i) * s * c, (1.0 - i) * s * c, s * s + i * c * c;
            apply_jones(state, e.rail_a, j);
            return state;
        }
        case Kind::Phase: {
            Eigen::Matrix2cd j = Eigen::Matrix2cd::Identity();
            j(1, 1) = std::polar(1.0, e.param);
            apply_jones(state, e.rail_a, j);
            return state;
        }
        case Kind::Attenuator: {
            const Mat u = rotation2(e.param);
            for (int l = 0; l < kLabels; ++l)
                state.apply_mode_unitary(
                    {mode_id(e.rail_a, e.pol, l), mode_id(e.loss_rail, e.pol, l)}, u);
            return state;
        }
        case Kind::PolUnitary: {
            apply_jones(state, e.rail_a, e.jones);
            return state;
        }
        case Kind::LabelMix: {
            const Mat u = rotation2(std::sqrt(e.param));
            for (int pol = 0; pol < 2; ++pol)
                state.apply_mode_unitary({mode_id(e.rail_a, pol, e.from_label),
                                          mode_id(e.rail_a, pol, e.to_label)},
                                         u);
            return state;
        }
    }
    throw DimensionError("unknown optical element");
}

FockState distinguishability_mix(FockState state, int rail, double visibility, int from_label,
                                 int to_label) {
    if (visibility < 0 || visibility > 1)
        throw DimensionError("visibility must lie in [0, 1]");
    return apply_element(std::move(state),
                         OpticalElement::label_mix(visibility, rail, from_label, to_label));
}

double hom_coincidence_probability(double visibility, double transmission) {
    FockState s = FockState::vacuum();
    Vec pol(2), l0(1), lmix(2);
    pol << 1, 0;
    l0 << 1;
    lmix << std::sqrt(visibility), std::sqrt(1.0 - visibility);
    s.create_photon(0, pol, l0);
    s.create_photon(1, pol, lmix);
    s = apply_element(std::move(s), OpticalElement::bs(transmission, 0, 1));
    FockState copy = s;
    return copy.post_select({0, 1}, {});
}

PpbsCzResult ppbs_cz(const Vec& qubit_a, const Vec& qubit_b, double visibility) {
    const double t_bal = std::sqrt(1.0 / 3.0);
    auto run = [&](const Vec& qa, const Vec& qb) {
        FockState s = FockState::vacuum();
        Vec l0(1), lmix(2);
        l0 << 1;
        lmix << std::sqrt(visibility), std::sqrt(1.0 - visibility);
        s.create_photon(0, qa, l0);
        s.create_photon(1, qb, lmix);
        s = apply_element(std::move(s), OpticalElement::attenuator(t_bal, 0, 0, 2));
        s = apply_element(std::move(s), OpticalElement::attenuator(t_bal, 1, 0, 3));
        s = apply_element(std::move(s), OpticalElement::ppbs(1.0 / 3.0, 0, 1));
        return s;
    };
    PpbsCzResult out;
    // conditional map from the four computational-basis inputs
    out.conditional_map = Eigen::Matrix4cd::Zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Vec qa = Vec::Zero(2), qb = Vec::Zero(2);
            qa(i) = 1;
            qb(j) = 1;
            FockState s = run(qa, qb);
            for (int oi = 0; oi < 2; ++oi)
                for (int oj = 0; oj < 2; ++oj)
                    out.conditional_map(oi * 2 + oj, i * 2 + j) +=
                        s.amplitude({mode_id(0, oi, 0), mode_id(1, oj, 0)});
        }
    FockState s = run(qubit_a, qubit_b);
    out.success_probability = s.post_select({0, 1}, {2, 3});
    return out;
}

std::vector<PhaseAddBranch> pbs_phase_add(const Eigen::Vector2cd& anc_a,
                                          const Eigen::Vector2cd& anc_b, double visibility) {
    FockState s = FockState::vacuum();
    Vec l0(1), lmix(2), pa(2), pb(2);
    l0 << 1;
    lmix << std::sqrt(visibility), std::sqrt(1.0 - visibility);
    pa << anc_a(0), anc_a(1);
    pb << anc_b(0), anc_b(1);
    s.create_photon(0, pa, l0);
    s.create_photon(1, pb, lmix);
    s = apply_element(std::move(s), OpticalElement::pbs(0, 1));
    s = apply_element(std::move(s), OpticalElement::hwp(M_PI / 8, 1));
    const double p_coinc = s.post_select({0, 1}, {});
    std::vector<PhaseAddBranch> out;
    if (p_coinc <= 0) return out;
    const auto branches = s.measure_polarization(1);
    for (int pol = 0; pol < 2; ++pol) {
        const auto& [p, st] = branches[static_cast<std::size_t>(pol)];
        if (p <= 0) continue;
        PhaseAddBranch b;
        b.herald_k1 = pol == 1 ? 0 : 1;  // V heralds k1 = 0, H heralds k1 = 1
        b.probability = p_coinc * p;
        b.output_density = st.polarization_density(0);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(b.output_density);
        b.output = es.eigenvectors().col(1);  // dominant component
        out.push_back(b);
    }
    return out;
}

void NoiseParams::validate() const {
    if (visibility_intra < 0 || visibility_intra > 1 || visibility_inter < 0 ||
        visibility_inter > 1)
        throw DimensionError("visibilities must lie in [0, 1]");
    if (double_pair_rate < 0 || accidental_rate < 0)
        throw DimensionError("background rates must be nonnegative");
}

std::vector<double> background_model(const std::vector<double>& raw_counts,
                                     const NoiseParams& noise, double double_pair_multiplier,
                                     double accidental_multiplier) {
    noise.validate();
    if (double_pair_multiplier < 0 || accidental_multiplier < 0)
        throw DimensionError("background multipliers must be nonnegative");
    double total = 0;
    for (double c : raw_counts) total += c;
    const double fraction = noise.double_pair_rate * double_pair_multiplier +
                            noise.accidental_rate * accidental_multiplier;
    const double per_cell = raw_counts.empty() ? 0.0 : fraction * total / raw_counts.size();
    return std::vector<double>(raw_counts.size(), per_cell);
}

std::vector<double> background_subtract(const std::vector<double>& raw_counts,
                                        const std::vector<double>& expected_background) {
    if (raw_counts.size() != expected_background.size())
        throw DimensionError("background_subtract size mismatch");
    std::vector<double> out(raw_counts.size());
    for (std::size_t i = 0; i < raw_counts.size(); ++i)
        out[i] = std::max(0.0, raw_counts[i] - expected_background[i]);
    return out;
}

}  // namespace qfhe::optics
