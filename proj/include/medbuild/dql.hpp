#pragma once

// Dimensional Qualitative Local-health-intelligence (DQL) codec.
//
// A DQL string is a compact pipe-delimited record of a community's planning
// context, e.g.
//
//   P:pop=50000,age0_14=0.25|H:dis=H(inc=80,res=0.6),D(inc=120,res=0.1)|X:budget=5.
//
// Grammar:
//   DQL          := DIM ('|' DIM)* '.'
//   DIM          := TAG ':' ENTRY (',' ENTRY)*
//   ENTRY        := KEY '=' VALUE | DISEASE_CONT
//   DISEASE_CONT := LETTER '(' KEY '=' NUM (',' KEY '=' NUM)* ')'
//
// Whitespace between tokens is ignored. Unknown keys are kept verbatim as
// extras and re-emitted after the known keys of their dimension.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace medbuild::dql {

/// Ordered unknown `key=value` pairs, value kept as raw text.
using Extras = std::vector<std::pair<std::string, std::string>>;

struct DiseaseEntry {
    char code = 'A';
    double incidence = 0.0;        // cases per 1,000 population per year
    double resource_factor = 0.0;  // fraction needing inpatient/specialized care
    Extras extras;

    bool operator==(const DiseaseEntry&) const = default;
};

/// Letter-prefixed fraction run such as `C0.7M0.3`.
///
/// When the text cannot be split into unambiguous (letter, fraction) runs the
/// parts recovered so far are kept, `ambiguous` is set and the original text
/// is preserved in `raw` so it re-serializes verbatim.
struct CompositionToken {
    std::vector<std::pair<char, double>> parts;
    bool ambiguous = false;
    std::string raw;  // only populated when ambiguous

    bool operator==(const CompositionToken&) const = default;
};

struct Population {
    std::optional<double> pop, age0_14, age15_64, age65_up, growth_rate, gender;
    Extras extras;
    bool operator==(const Population&) const = default;
};

struct Health {
    std::optional<std::vector<DiseaseEntry>> diseases;
    std::optional<std::string> risk;
    Extras extras;
    bool operator==(const Health&) const = default;
};

struct Culture {
    std::optional<CompositionToken> rel;
    std::optional<std::string> sexsep;
    std::optional<double> trad;
    std::optional<std::string> hol;
    Extras extras;
    bool operator==(const Culture&) const = default;
};

struct Maternal {
    std::optional<double> fert, mar, health;
    Extras extras;
    bool operator==(const Maternal&) const = default;
};

struct Existing {
    std::optional<double> total_beds, quality_factor, or_rooms;
    Extras extras;
    bool operator==(const Existing&) const = default;
};

struct Infrastructure {
    std::optional<double> fac, water, infra;
    Extras extras;
    bool operator==(const Infrastructure&) const = default;
};

struct Social {
    std::optional<std::string> conflict;
    std::optional<double> ref, vio, trust;
    Extras extras;
    bool operator==(const Social&) const = default;
};

struct Economy {
    std::optional<double> gdp, pov;
    std::optional<CompositionToken> emp;
    std::optional<double> budget;  // millions USD
    Extras extras;
    bool operator==(const Economy&) const = default;
};

struct Geoclimate {
    std::optional<double> temp, rain;
    std::optional<std::string> disrisk, mat, construct_pref;
    Extras extras;
    bool operator==(const Geoclimate&) const = default;
};

struct Site {
    std::optional<double> size;
    std::optional<std::string> access, utilities, topography;
    Extras extras;
    bool operator==(const Site&) const = default;
};

/// Parsed DQL. A dimension is engaged iff its tag appeared in the text.
struct DqlRecord {
    std::optional<Population> population;          // P
    std::optional<Health> health;                  // H
    std::optional<Culture> culture;                // C
    std::optional<Maternal> maternal;              // M
    std::optional<Existing> existing;              // E
    std::optional<Infrastructure> infrastructure;  // I
    std::optional<Social> social;                  // S
    std::optional<Economy> economy;                // X
    std::optional<Geoclimate> geoclimate;          // G
    std::optional<Site> site;                      // SITE

    bool operator==(const DqlRecord&) const = default;
};

enum class ParseErrorKind { MalformedDimension, MalformedEntry, UnterminatedString };

std::string_view to_string(ParseErrorKind kind);

class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorKind kind, std::size_t position, const std::string& detail);

    ParseErrorKind kind() const noexcept { return kind_; }
    /// Byte offset into the input where the problem was detected.
    std::size_t position() const noexcept { return position_; }

private:
    ParseErrorKind kind_;
    std::size_t position_;
};

class InvalidRecord : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Severity { Hard, Soft };

struct Violation {
    Severity severity = Severity::Hard;
    std::string path;
    std::string message;

    bool operator==(const Violation&) const = default;
};

std::string_view to_string(Severity severity);

DqlRecord parse_dql(std::string_view text);

/// Canonical form: dimensions in P,H,C,M,E,I,S,X,G,SITE order, known keys in
/// table order followed by extras, numbers in shortest round-trip form.
/// Throws InvalidRecord when validate() reports a hard violation.
std::string serialize_dql(const DqlRecord& record);

/// Range and presence checks. Never throws.
std::vector<Violation> validate(const DqlRecord& record);

bool has_hard_violation(const std::vector<Violation>& violations);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

}  // namespace medbuild::dql
