#pragma once

namespace cbar {

struct Caps {
    // Largest affine dimension handed to vertex or facet enumeration.
    int geometry_dim = 8;
    // Largest number of ReLU neurons the region oracle may branch on.
    int oracle_relus = 14;
};

/// Process-wide caps. Initialised from CONVEX_BARRIER_CAP, which holds either
/// "N" (geometry cap) or "N,M" (geometry cap, oracle ReLU cap).
const Caps& caps();
void set_caps(const Caps& value);

/// RAII override, mostly for tests.
class ScopedCaps {
public:
    explicit ScopedCaps(const Caps& value);
    ~ScopedCaps();
    ScopedCaps(const ScopedCaps&) = delete;
    ScopedCaps& operator=(const ScopedCaps&) = delete;

private:
    Caps saved_;
};

}  // namespace cbar
