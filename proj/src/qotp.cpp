#include "qfhe/qotp.hpp"

namespace qfhe {

PadKey random_pad(RandomStream& rng) { return PadKey{rng.bit(), rng.bit()}; }

PureState encrypt(const PureState& plaintext, PadKey key) {
    if (plaintext.num_qubits() != 1) throw DimensionError("encrypt expects a single qubit");
    return PureState::from_amplitudes(pad_operator(key.a, key.b) * plaintext.amplitudes());
}

PureState decrypt(const PureState& ciphertext, PadKey key) {
    if (ciphertext.num_qubits() != 1) throw DimensionError("decrypt expects a single qubit");
    // X^b then Z^a; the pad is self-inverse up to a global phase
    return PureState::from_amplitudes(pad_operator(key.a, key.b) * ciphertext.amplitudes());
}

DensityMatrix pad_twirl_check(const PureState& plaintext) {
    Mat sum = Mat::Zero(2, 2);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const PureState c = encrypt(plaintext, {a, b});
            sum += c.amplitudes() * c.amplitudes().adjoint();
        }
    return DensityMatrix::from_matrix(sum / 4.0);
}

std::string Symbol::to_string() const {
    switch (kind) {
        case Kind::PadA: return "a" + std::to_string(wire);
        case Kind::PadB: return "b" + std::to_string(wire);
        case Kind::MaskQ: return "q" + std::to_string(wire);
        case Kind::MaskR: return "r" + std::to_string(wire);
        case Kind::ProdAB: return "ab" + std::to_string(wire);
        case Kind::Meas: return "k" + std::to_string(index);
    }
    return "?";
}

KeyExpr KeyExpr::one() {
    KeyExpr e;
    e.constant_ = 1;
    return e;
}

KeyExpr KeyExpr::symbol(Symbol s) {
    KeyExpr e;
    e.symbols_.insert(s);
    return e;
}

KeyExpr& KeyExpr::operator^=(const KeyExpr& other) {
    constant_ ^= other.constant_;
    for (const Symbol& s : other.symbols_) {
        auto [it, inserted] = symbols_.insert(s);
        if (!inserted) symbols_.erase(it);
    }
    return *this;
}

KeyExpr KeyExpr::symbol_part() const {
    KeyExpr e = *this;
    e.constant_ = 0;
    return e;
}

int KeyExpr::evaluate(const std::map<Symbol, int>& env) const {
    int v = constant_;
    for (const Symbol& s : symbols_) {
        auto it = env.find(s);
        if (it == env.end())
            throw std::invalid_argument("unbound symbol " + s.to_string());
        v ^= (it->second & 1);
    }
    return v;
}

std::string KeyExpr::to_string() const {
    std::string out = constant_ ? "1" : "";
    for (const Symbol& s : symbols_) {
        if (!out.empty()) out += "+";
        out += s.to_string();
    }
    return out.empty() ? "0" : out;
}

void key_update(GateKind gate, const std::vector<int>& wires, std::vector<KeyExprPair>& keys) {
    auto at = [&](std::size_t i) -> KeyExprPair& {
        const int w = wires.at(i);
        if (w < 0 || w >= static_cast<int>(keys.size()))
            throw DimensionError("key_update wire out of range");
        return keys[static_cast<std::size_t>(w)];
    };
    switch (gate) {
        case GateKind::I:
        case GateKind::X:
        case GateKind::Z:
        case GateKind::Y:
            // Pauli gates commute with the pad up to a global phase
            return;
        case GateKind::H: {
            auto& k = at(0);
            std::swap(k.z, k.x);
            return;
        }
        case GateKind::P:
        case GateKind::Pdag: {
            auto& k = at(0);
            k.z ^= k.x;
            return;
        }
        case GateKind::CNOT: {
            auto& c = at(0);
            auto& t = at(1);
            c.z ^= t.z;
            t.x ^= c.x;
            return;
        }
        case GateKind::CZ: {
            auto& c = at(0);
            auto& t = at(1);
            KeyExpr cx = c.x;  // copy before mutation
            c.z ^= t.x;
            t.z ^= cx;
            return;
        }
        default:
            throw UnsupportedGateError("key_update does not support gate " + gate_name(gate));
    }
}

PureState realize_ancilla(int phase_bit, int mask_bit) {
    Vec v(2);
    v << 1.0, 1.0;
    v /= v.norm();
    PureState s = PureState::from_amplitudes(v);
    if (phase_bit) s = apply_gate(s, Gate::make(GateKind::P), {0});
    if (mask_bit) s = apply_gate(s, Gate::make(GateKind::Z), {0});
    return s;
}

}  // namespace qfhe
