#pragma once

#include <stdexcept>
#include <string>

namespace toricsym {

// Every failure carries a stable kind string so the CLI and tests can
// dispatch on it without parsing messages.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

    // Classification failures map to exit code 2, everything else to 1.
    bool is_classification() const;

private:
    std::string kind_;
};

inline Error error(const std::string& kind, const std::string& msg) { return Error(kind, msg); }

inline bool Error::is_classification() const {
    static const char* kinds[] = {"NonSymmetricInput", "SingularForm", "DegenerateSubspace",
                                  "NonCommuting", "NonResonantSpectrum", "NotFiniteOrder",
                                  "InvolutionDefect", "AssemblyDefect", "RankDeficient",
                                  "NonSemisimple", "KindMismatch", "NonSymplectic"};
    for (auto k : kinds)
        if (kind_ == k) return true;
    return false;
}

}  // namespace toricsym
