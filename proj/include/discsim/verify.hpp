#pragma once
#include <iosfwd>
#include <string>
#include <vector>

namespace discsim {

struct VerifyCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyReport {
    std::string suite;
    std::vector<VerifyCheck> checks;
    bool pass = false;
};

/// Runs one of the named suites: oracles, invariants, envy-equivalence,
/// adversary, facts, or all. Throws ConfigError for unknown names.
VerifyReport verify_suite(const std::string& suite);

void write_verify_json(std::ostream& out, const VerifyReport& report);
void write_verify_text(std::ostream& out, const VerifyReport& report);

}  // namespace discsim
