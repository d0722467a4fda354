#include "gbcorr/parallel.hpp"

#include <cstdlib>
#include <string>

#include "gbcorr/errors.hpp"

namespace gbcorr {

int default_threads()
{
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

int resolve_threads(int configured)
{
    if (const char* env = std::getenv("GBCORR_THREADS"); env && *env) {
        const std::string s(env);
        if (s == "max") return default_threads();
        try {
            std::size_t pos = 0;
            const int v = std::stoi(s, &pos);
            if (pos == s.size() && v > 0) return v;
        } catch (const std::exception&) {
        }
        throw ValidationError("GBCORR_THREADS must be a positive integer or 'max'");
    }
    if (configured <= 0) return default_threads();
    return configured;
}

}  // namespace gbcorr
