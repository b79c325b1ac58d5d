#pragma once

// Registry of executable claims: structural laws, the factorization toolkit,
// the Pid counterexample, the name-capture remark and coincidence sampling.

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hopi/semantics.hpp"
#include "hopi/sort.hpp"

namespace hopi {

struct ClaimCheck {
    std::string name;
    bool ok = false;
    std::string detail;
};

struct ClaimReport {
    std::string id;
    bool passed = false;
    std::vector<ClaimCheck> checks;
    nlohmann::json verdicts = nlohmann::json::array();
    std::string commentary;
    double millis = 0;
};

class ClaimRun;

/// A term written in the surface syntax, as used by a claim.
struct ClaimSource {
    CalcId calc;
    std::string text;
};

struct Claim {
    std::string id;
    std::string title;
    /// Where the claim comes from, in words.
    std::string reference;
    std::vector<ClaimSource> sources;
    std::function<void(ClaimRun&)> run;
};

/// Accumulates the checks of one claim.
class ClaimRun {
public:
    explicit ClaimRun(ExploreBudget budget) : budget_(std::move(budget)) {}

    const ExploreBudget& budget() const { return budget_; }
    void expect(bool ok, std::string name, std::string detail = {});
    void record(nlohmann::json verdict) { report_.verdicts.push_back(std::move(verdict)); }
    void comment(std::string text) { report_.commentary = std::move(text); }
    ClaimReport& report() { return report_; }

private:
    ExploreBudget budget_;
    ClaimReport report_;
};

const std::vector<Claim>& claims();

/// Runs one claim. Throws UnknownClaim for an unregistered id.
ClaimReport run_claim(const std::string& id, const ExploreBudget& budget = {});

nlohmann::json report_to_json(const ClaimReport& r);

/// Pairs compared by the coincidence claim.
struct CorpusPair {
    std::string left;
    std::string right;
    bool bisimilar = false;  // what the pair was designed to be
};

std::vector<CorpusPair> coincidence_corpus();

}  // namespace hopi
