#pragma once

// Shared containers for field-free eigenbases and velocity-gauge dipole
// couplings, common to the model atom and the two-center system.

#include <string>
#include <vector>

#include "specbox/matrix.hpp"

namespace specbox {

enum class Parity { gerade, ungerade, none };
enum class Orientation { parallel, perpendicular, isotropic };

inline std::string to_string(Orientation o) {
    switch (o) {
        case Orientation::parallel: return "parallel";
        case Orientation::perpendicular: return "perpendicular";
        default: return "isotropic";
    }
}

inline Orientation orientation_from_string(const std::string& s) {
    if (s == "parallel") return Orientation::parallel;
    if (s == "perpendicular") return Orientation::perpendicular;
    if (s == "isotropic") return Orientation::isotropic;
    throw ConfigError("unknown orientation '" + s + "'");
}

// Decoupled sector of the eigenproblem.  For the atom `lambda` holds the
// orbital angular momentum l and parity is none.  `m_signed` distinguishes
// the two degenerate partners in explicit-degeneracy reference systems;
// symmetrized (propagated) bases keep m_signed == lambda.
struct BlockLabel {
    int lambda = 0;
    Parity parity = Parity::none;
    int m_signed = 0;

    bool operator==(const BlockLabel&) const = default;

    std::string str() const {
        static const char* greek[] = {"sigma", "pi", "delta", "phi", "gamma"};
        std::string s;
        if (parity == Parity::none) {
            s = "l=" + std::to_string(lambda);
        } else {
            s = lambda <= 4 ? greek[lambda] : "L=" + std::to_string(lambda);
            s += parity == Parity::gerade ? "_g" : "_u";
        }
        if (m_signed != lambda) s += "(M=" + std::to_string(m_signed) + ")";
        return s;
    }
};

struct StateBlock {
    BlockLabel label;
    std::vector<double> energies;  // ascending
    DenseMatrix coeffs;            // basis_dim x n_states, overlap-orthonormal columns

    int num_states() const { return static_cast<int>(energies.size()); }
};

struct SpectralBasis {
    std::vector<StateBlock> blocks;
    double ionisation_threshold = 0.0;  // states above it count as ionised

    int total_states() const {
        int n = 0;
        for (const auto& b : blocks) n += b.num_states();
        return n;
    }
    int block_index(const BlockLabel& l) const {
        for (size_t i = 0; i < blocks.size(); ++i)
            if (blocks[i].label == l) return static_cast<int>(i);
        return -1;
    }
};

// One rectangular block of <to| e.grad |from> between eigenstates of two
// symmetry sectors.  The full coupling matrix is antisymmetric: the reverse
// block is -d^T and is not stored.
struct CouplingBlock {
    int from = 0, to = 0;   // indices into SpectralBasis::blocks
    DenseMatrix d;          // n_states(to) x n_states(from)
    double sym_factor = 1.0;  // degeneracy factor already applied to d
};

struct DipoleCouplingSet {
    Orientation orientation = Orientation::parallel;
    std::vector<CouplingBlock> blocks;
};

} // namespace specbox
