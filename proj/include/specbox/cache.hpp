#pragma once

// Self-describing binary container for an eigenbasis plus its dipole sets.
// Layout: magic, format version, config fingerprint, block table, energies,
// coefficient arrays, coupling blocks; 64-bit little-endian floats
// throughout.  A fingerprint or framing mismatch invalidates the file and
// the caller rebuilds.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "specbox/basis_types.hpp"
#include "specbox/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "cache files are little-endian; big-endian hosts need byte swaps");

namespace specbox {

inline constexpr char cache_magic[8] = {'S', 'P', 'B', 'X', 'B', 'A', 'S', '1'};
inline constexpr std::uint32_t cache_version = 1;

struct CachedBasis {
    SpectralBasis basis;
    std::vector<DipoleCouplingSet> couplings;
};

namespace cache_detail {

template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
bool get(std::istream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return static_cast<bool>(is);
}

} // namespace cache_detail

inline void write_cache(const std::string& path, std::uint64_t fingerprint,
                        const CachedBasis& cb) {
    using cache_detail::put;
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot write cache '" + path + "'");
    os.write(cache_magic, sizeof cache_magic);
    put(os, cache_version);
    put(os, fingerprint);
    put(os, cb.basis.ionisation_threshold);
    put(os, static_cast<std::uint32_t>(cb.basis.blocks.size()));
    for (const auto& b : cb.basis.blocks) {
        put(os, static_cast<std::int32_t>(b.label.lambda));
        put(os, static_cast<std::int32_t>(b.label.parity));
        put(os, static_cast<std::int32_t>(b.label.m_signed));
        put(os, static_cast<std::uint32_t>(b.num_states()));
        put(os, static_cast<std::uint32_t>(b.coeffs.rows()));
        os.write(reinterpret_cast<const char*>(b.energies.data()),
                 static_cast<std::streamsize>(b.energies.size() * sizeof(double)));
        os.write(reinterpret_cast<const char*>(b.coeffs.data()),
                 static_cast<std::streamsize>(static_cast<size_t>(b.coeffs.rows()) *
                                              b.coeffs.cols() * sizeof(double)));
    }
    put(os, static_cast<std::uint32_t>(cb.couplings.size()));
    for (const auto& set : cb.couplings) {
        put(os, static_cast<std::uint32_t>(set.orientation));
        put(os, static_cast<std::uint32_t>(set.blocks.size()));
        for (const auto& c : set.blocks) {
            put(os, static_cast<std::int32_t>(c.from));
            put(os, static_cast<std::int32_t>(c.to));
            put(os, c.sym_factor);
            put(os, static_cast<std::uint32_t>(c.d.rows()));
            put(os, static_cast<std::uint32_t>(c.d.cols()));
            os.write(reinterpret_cast<const char*>(c.d.data()),
                     static_cast<std::streamsize>(static_cast<size_t>(c.d.rows()) * c.d.cols() *
                                                  sizeof(double)));
        }
    }
    if (!os) throw IoError("short write to cache '" + path + "'");
}

// nullopt on any mismatch (missing file, bad magic/version, wrong
// fingerprint, truncation): the cache is then ignored and rebuilt.
inline std::optional<CachedBasis> read_cache(const std::string& path, std::uint64_t fingerprint) {
    using cache_detail::get;
    std::ifstream is(path, std::ios::binary);
    if (!is) return std::nullopt;
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, cache_magic, sizeof magic) != 0) return std::nullopt;
    std::uint32_t version = 0;
    std::uint64_t fp = 0;
    if (!get(is, version) || version != cache_version) return std::nullopt;
    if (!get(is, fp) || fp != fingerprint) return std::nullopt;

    CachedBasis cb;
    std::uint32_t n_blocks = 0;
    if (!get(is, cb.basis.ionisation_threshold) || !get(is, n_blocks)) return std::nullopt;
    if (n_blocks > 4096) return std::nullopt;
    for (std::uint32_t b = 0; b < n_blocks; ++b) {
        std::int32_t lambda, parity, m_signed;
        std::uint32_t n_states, dim;
        if (!get(is, lambda) || !get(is, parity) || !get(is, m_signed) || !get(is, n_states) ||
            !get(is, dim))
            return std::nullopt;
        if (n_states > 5'000'000 || dim > 5'000'000) return std::nullopt;
        StateBlock sb;
        sb.label = BlockLabel{lambda, static_cast<Parity>(parity), m_signed};
        sb.energies.resize(n_states);
        is.read(reinterpret_cast<char*>(sb.energies.data()),
                static_cast<std::streamsize>(n_states * sizeof(double)));
        sb.coeffs = DenseMatrix(static_cast<int>(dim), static_cast<int>(n_states));
        is.read(reinterpret_cast<char*>(sb.coeffs.data()),
                static_cast<std::streamsize>(static_cast<size_t>(dim) * n_states * sizeof(double)));
        if (!is) return std::nullopt;
        cb.basis.blocks.push_back(std::move(sb));
    }
    std::uint32_t n_sets = 0;
    if (!get(is, n_sets) || n_sets > 16) return std::nullopt;
    for (std::uint32_t s = 0; s < n_sets; ++s) {
        DipoleCouplingSet set;
        std::uint32_t orient = 0, nb = 0;
        if (!get(is, orient) || !get(is, nb) || nb > 4096) return std::nullopt;
        set.orientation = static_cast<Orientation>(orient);
        for (std::uint32_t i = 0; i < nb; ++i) {
            CouplingBlock c;
            std::int32_t from, to;
            std::uint32_t rows, cols;
            if (!get(is, from) || !get(is, to) || !get(is, c.sym_factor) || !get(is, rows) ||
                !get(is, cols))
                return std::nullopt;
            if (rows > 5'000'000 || cols > 5'000'000) return std::nullopt;
            c.from = from;
            c.to = to;
            c.d = DenseMatrix(static_cast<int>(rows), static_cast<int>(cols));
            is.read(reinterpret_cast<char*>(c.d.data()),
                    static_cast<std::streamsize>(static_cast<size_t>(rows) * cols * sizeof(double)));
            if (!is) return std::nullopt;
            set.blocks.push_back(std::move(c));
        }
        cb.couplings.push_back(std::move(set));
    }
    // trailing garbage also invalidates
    is.peek();
    if (!is.eof()) return std::nullopt;
    return cb;
}

} // namespace specbox
