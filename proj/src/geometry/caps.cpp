#include "cbar/caps.hpp"

#include <cstdlib>
#include <string>

namespace cbar {

namespace {

Caps from_environment()
{
    Caps c;
    const char* raw = std::getenv("CONVEX_BARRIER_CAP");
    if (!raw || !*raw)
        return c;
    std::string text(raw);
    try {
        auto comma = text.find(',');
        c.geometry_dim = std::stoi(text.substr(0, comma));
        if (comma != std::string::npos)
            c.oracle_relus = std::stoi(text.substr(comma + 1));
    } catch (const std::exception&) {
        // malformed values fall back to the defaults
        return Caps{};
    }
    return c;
}

Caps& storage()
{
    static Caps c = from_environment();
    return c;
}

}  // namespace

const Caps& caps()
{
    return storage();
}

void set_caps(const Caps& value)
{
    storage() = value;
}

ScopedCaps::ScopedCaps(const Caps& value) : saved_(caps())
{
    set_caps(value);
}

ScopedCaps::~ScopedCaps()
{
    set_caps(saved_);
}

}  // namespace cbar
