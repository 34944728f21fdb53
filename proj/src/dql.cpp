#include "medbuild/dql.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <set>
#include <system_error>

namespace medbuild::dql {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_alpha(char c) { return is_upper(c) || (c >= 'a' && c <= 'z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_key_char(char c) { return is_alpha(c) || is_digit(c) || c == '_'; }
bool is_code_char(char c) { return is_key_char(c) || c == '-' || c == '+'; }

bool valid_key(std::string_view key) {
    return !key.empty() && std::all_of(key.begin(), key.end(), is_key_char);
}

bool valid_code(std::string_view code) {
    return !code.empty() && std::all_of(code.begin(), code.end(), is_code_char);
}

// Input with whitespace removed; pos[i] is the byte offset of compact[i] in
// the original text.
struct CompactText {
    std::string text;
    std::vector<std::size_t> pos;
    std::size_t original_size = 0;

    std::size_t at(std::size_t i) const { return i < pos.size() ? pos[i] : original_size; }
};

CompactText compact(std::string_view text) {
    CompactText out;
    out.original_size = text.size();
    out.text.reserve(text.size());
    out.pos.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!is_space(text[i])) {
            out.text.push_back(text[i]);
            out.pos.push_back(i);
        }
    }
    return out;
}

struct Span {
    std::size_t begin = 0;  // offset into the compact text
    std::string_view text;
};

// Splits on `sep` outside parentheses.
std::vector<Span> split_top_level(std::string_view text, std::size_t base, char sep) {
    std::vector<Span> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '(') {
            ++depth;
        } else if (c == ')') {
            depth = std::max(0, depth - 1);
        } else if (c == sep && depth == 0) {
            out.push_back({base + start, text.substr(start, i - start)});
            start = i + 1;
        }
    }
    out.push_back({base + start, text.substr(start)});
    return out;
}

class Parser {
public:
    explicit Parser(const CompactText& input) : in_(input) {}

    [[noreturn]] void fail(ParseErrorKind kind, std::size_t compact_offset, const std::string& what) const {
        throw ParseError(kind, in_.at(compact_offset), what);
    }

    double number(const Span& s) const {
        double v = 0.0;
        const char* first = s.text.data();
        const char* last = first + s.text.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (s.text.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
            fail(ParseErrorKind::MalformedEntry, s.begin, "expected a number, got '" + std::string(s.text) + "'");
        }
        return v;
    }

    std::string code(const Span& s) const {
        if (!valid_code(s.text)) {
            fail(ParseErrorKind::MalformedEntry, s.begin, "expected a code, got '" + std::string(s.text) + "'");
        }
        return std::string(s.text);
    }

    CompositionToken composition(const Span& s) const {
        if (s.text.empty()) {
            fail(ParseErrorKind::MalformedEntry, s.begin, "empty composition token");
        }
        CompositionToken tok;
        std::string_view t = s.text;
        std::size_t i = 0;
        while (i < t.size()) {
            if (!is_alpha(t[i])) {
                tok.ambiguous = true;
                break;
            }
            const char letter = t[i++];
            const std::size_t num_begin = i;
            while (i < t.size() && is_digit(t[i])) ++i;
            if (i < t.size() && t[i] == '.') {
                ++i;
                const std::size_t frac_begin = i;
                while (i < t.size() && is_digit(t[i])) ++i;
                if (i == frac_begin) {
                    tok.ambiguous = true;
                    break;
                }
            }
            if (i == num_begin) {
                tok.ambiguous = true;
                break;
            }
            double v = 0.0;
            std::from_chars(t.data() + num_begin, t.data() + i, v);
            tok.parts.emplace_back(letter, v);
        }
        if (tok.ambiguous) tok.raw = std::string(t);
        return tok;
    }

    DiseaseEntry disease(const Span& s) const {
        std::string_view t = s.text;
        if (t.size() < 4 || !is_upper(t[0]) || t[1] != '(' || t.back() != ')') {
            fail(ParseErrorKind::MalformedEntry, s.begin,
                 "expected disease token LETTER(key=num,...), got '" + std::string(t) + "'");
        }
        DiseaseEntry d;
        d.code = t[0];
        bool have_inc = false, have_res = false;
        std::set<std::string> seen;
        for (const Span& kv : split_top_level(t.substr(2, t.size() - 3), s.begin + 2, ',')) {
            const auto eq = kv.text.find('=');
            if (eq == std::string_view::npos) {
                fail(ParseErrorKind::MalformedEntry, kv.begin, "expected key=value inside disease token");
            }
            std::string key(kv.text.substr(0, eq));
            Span value{kv.begin + eq + 1, kv.text.substr(eq + 1)};
            if (!valid_key(key) || !seen.insert(key).second) {
                fail(ParseErrorKind::MalformedEntry, kv.begin, "bad or duplicate key '" + key + "' in disease token");
            }
            const double v = number(value);
            if (key == "inc") {
                d.incidence = v;
                have_inc = true;
            } else if (key == "res") {
                d.resource_factor = v;
                have_res = true;
            } else {
                d.extras.emplace_back(key, std::string(value.text));
            }
        }
        if (!have_inc || !have_res) {
            fail(ParseErrorKind::MalformedEntry, s.begin, "disease token requires inc and res");
        }
        return d;
    }

    DqlRecord run() {
        const std::string_view text = in_.text;
        if (text.empty() || text.back() != '.') {
            throw ParseError(ParseErrorKind::UnterminatedString, in_.original_size,
                             "DQL string must end with '.'");
        }
        const std::string_view body = text.substr(0, text.size() - 1);
        DqlRecord rec;
        std::set<std::string> tags;
        for (const Span& dim : split_top_level(body, 0, '|')) {
            const auto colon = dim.text.find(':');
            if (colon == std::string_view::npos) {
                fail(ParseErrorKind::MalformedDimension, dim.begin, "expected TAG:entries");
            }
            const std::string tag(dim.text.substr(0, colon));
            if (!tags.insert(tag).second) {
                fail(ParseErrorKind::MalformedDimension, dim.begin, "duplicate dimension '" + tag + "'");
            }
            const auto entries = split_top_level(dim.text.substr(colon + 1), dim.begin + colon + 1, ',');
            parse_dimension(rec, tag, dim.begin, entries);
        }
        return rec;
    }

private:
    struct Entry {
        std::string key;  // empty for disease continuations
        Span value;
        Span whole;
    };

    std::vector<Entry> entries_of(const std::vector<Span>& raw) const {
        std::vector<Entry> out;
        std::set<std::string> seen;
        for (const Span& e : raw) {
            if (e.text.empty()) fail(ParseErrorKind::MalformedEntry, e.begin, "empty entry");
            const auto eq = e.text.find('=');
            const auto paren = e.text.find('(');
            if (eq != std::string_view::npos && (paren == std::string_view::npos || eq < paren)) {
                std::string key(e.text.substr(0, eq));
                Span value{e.begin + eq + 1, e.text.substr(eq + 1)};
                if (!valid_key(key)) fail(ParseErrorKind::MalformedEntry, e.begin, "invalid key '" + key + "'");
                if (value.text.empty()) fail(ParseErrorKind::MalformedEntry, value.begin, "empty value for '" + key + "'");
                if (!seen.insert(key).second) fail(ParseErrorKind::MalformedEntry, e.begin, "duplicate key '" + key + "'");
                out.push_back({std::move(key), value, e});
            } else if (e.text.size() >= 2 && is_upper(e.text[0]) && e.text[1] == '(') {
                out.push_back({std::string(), e, e});
            } else {
                fail(ParseErrorKind::MalformedEntry, e.begin,
                     "expected key=value or disease token, got '" + std::string(e.text) + "'");
            }
        }
        return out;
    }

    template <class Dim, class Handler>
    Dim fill(const std::vector<Span>& raw, Handler&& handle) const {
        Dim dim;
        for (const Entry& e : entries_of(raw)) {
            if (e.key.empty()) {
                fail(ParseErrorKind::MalformedEntry, e.whole.begin, "disease token outside a dis= list");
            }
            if (!handle(dim, e.key, e.value)) dim.extras.emplace_back(e.key, std::string(e.value.text));
        }
        return dim;
    }

    void parse_dimension(DqlRecord& rec, const std::string& tag, std::size_t at, const std::vector<Span>& raw) {
        auto num = [this](std::optional<double>& field, const Span& v) { field = number(v); };
        auto cod = [this](std::optional<std::string>& field, const Span& v) { field = code(v); };

        if (tag == "P") {
            rec.population = fill<Population>(raw, [&](Population& d, const std::string& k, const Span& v) {
                if (k == "pop") num(d.pop, v);
                else if (k == "age0_14") num(d.age0_14, v);
                else if (k == "age15_64") num(d.age15_64, v);
                else if (k == "age65_up") num(d.age65_up, v);
                else if (k == "growth_rate") num(d.growth_rate, v);
                else if (k == "gender") num(d.gender, v);
                else return false;
                return true;
            });
        } else if (tag == "H") {
            rec.health = parse_health(raw);
        } else if (tag == "C") {
            rec.culture = fill<Culture>(raw, [&](Culture& d, const std::string& k, const Span& v) {
                if (k == "rel") d.rel = composition(v);
                else if (k == "sexsep") cod(d.sexsep, v);
                else if (k == "trad") num(d.trad, v);
                else if (k == "hol") cod(d.hol, v);
                else return false;
                return true;
            });
        } else if (tag == "M") {
            rec.maternal = fill<Maternal>(raw, [&](Maternal& d, const std::string& k, const Span& v) {
                if (k == "fert") num(d.fert, v);
                else if (k == "mar") num(d.mar, v);
                else if (k == "health") num(d.health, v);
                else return false;
                return true;
            });
        } else if (tag == "E") {
            rec.existing = fill<Existing>(raw, [&](Existing& d, const std::string& k, const Span& v) {
                if (k == "total_beds") num(d.total_beds, v);
                else if (k == "quality_factor") num(d.quality_factor, v);
                else if (k == "or_rooms") num(d.or_rooms, v);
                else return false;
                return true;
            });
        } else if (tag == "I") {
            rec.infrastructure = fill<Infrastructure>(raw, [&](Infrastructure& d, const std::string& k, const Span& v) {
                if (k == "fac") num(d.fac, v);
                else if (k == "water") num(d.water, v);
                else if (k == "infra") num(d.infra, v);
                else return false;
                return true;
            });
        } else if (tag == "S") {
            rec.social = fill<Social>(raw, [&](Social& d, const std::string& k, const Span& v) {
                if (k == "conflict") cod(d.conflict, v);
                else if (k == "ref") num(d.ref, v);
                else if (k == "vio") num(d.vio, v);
                else if (k == "trust") num(d.trust, v);
                else return false;
                return true;
            });
        } else if (tag == "X") {
            rec.economy = fill<Economy>(raw, [&](Economy& d, const std::string& k, const Span& v) {
                if (k == "gdp") num(d.gdp, v);
                else if (k == "pov") num(d.pov, v);
                else if (k == "emp") d.emp = composition(v);
                else if (k == "budget") num(d.budget, v);
                else return false;
                return true;
            });
        } else if (tag == "G") {
            rec.geoclimate = fill<Geoclimate>(raw, [&](Geoclimate& d, const std::string& k, const Span& v) {
                if (k == "temp") num(d.temp, v);
                else if (k == "rain") num(d.rain, v);
                else if (k == "disrisk") cod(d.disrisk, v);
                else if (k == "mat") cod(d.mat, v);
                else if (k == "construct_pref") cod(d.construct_pref, v);
                else return false;
                return true;
            });
        } else if (tag == "SITE") {
            rec.site = fill<Site>(raw, [&](Site& d, const std::string& k, const Span& v) {
                if (k == "size") num(d.size, v);
                else if (k == "access") cod(d.access, v);
                else if (k == "utilities") cod(d.utilities, v);
                else if (k == "topography") cod(d.topography, v);
                else return false;
                return true;
            });
        } else {
            fail(ParseErrorKind::MalformedDimension, at, "unknown dimension tag '" + tag + "'");
        }
    }

    Health parse_health(const std::vector<Span>& raw) const {
        Health h;
        bool in_disease_list = false;
        for (const Entry& e : entries_of(raw)) {
            if (e.key.empty()) {
                if (!in_disease_list) {
                    fail(ParseErrorKind::MalformedEntry, e.whole.begin, "disease token outside a dis= list");
                }
                h.diseases->push_back(disease(e.whole));
                continue;
            }
            in_disease_list = false;
            if (e.key == "dis") {
                h.diseases = std::vector<DiseaseEntry>{disease(e.value)};
                in_disease_list = true;
            } else if (e.key == "risk") {
                h.risk = code(e.value);
            } else {
                h.extras.emplace_back(e.key, std::string(e.value.text));
            }
        }
        return h;
    }

    const CompactText& in_;
};

// ---------------------------------------------------------------------------
// serialization

class Writer {
public:
    void begin(std::string_view tag) {
        if (!out_.empty()) out_ += '|';
        out_ += tag;
        out_ += ':';
        first_ = true;
    }
    void raw(std::string_view key, std::string_view value) {
        sep();
        out_ += key;
        out_ += '=';
        out_ += value;
    }
    void num(std::string_view key, const std::optional<double>& v) {
        if (v) raw(key, format_number(*v));
    }
    void code(std::string_view key, const std::optional<std::string>& v) {
        if (v) raw(key, *v);
    }
    void comp(std::string_view key, const std::optional<CompositionToken>& v) {
        if (!v) return;
        if (v->ambiguous) {
            raw(key, v->raw);
            return;
        }
        std::string s;
        for (const auto& [letter, frac] : v->parts) {
            s += letter;
            s += format_number(frac);
        }
        raw(key, s);
    }
    void diseases(const std::optional<std::vector<DiseaseEntry>>& list) {
        if (!list) return;
        bool first_disease = true;
        for (const DiseaseEntry& d : *list) {
            std::string tok(1, d.code);
            tok += "(inc=" + format_number(d.incidence) + ",res=" + format_number(d.resource_factor);
            for (const auto& [k, v] : d.extras) tok += "," + k + "=" + v;
            tok += ')';
            if (first_disease) {
                raw("dis", tok);
                first_disease = false;
            } else {
                sep();
                out_ += tok;
            }
        }
    }
    void extras(const Extras& ex) {
        for (const auto& [k, v] : ex) raw(k, v);
    }
    std::string finish() { return out_ + '.'; }

private:
    void sep() {
        if (!first_) out_ += ',';
        first_ = false;
    }
    std::string out_;
    bool first_ = true;
};

// ---------------------------------------------------------------------------
// validation

class Checker {
public:
    void hard(std::string path, std::string msg) { out.push_back({Severity::Hard, std::move(path), std::move(msg)}); }
    void soft(std::string path, std::string msg) { out.push_back({Severity::Soft, std::move(path), std::move(msg)}); }

    void finite(const std::string& path, const std::optional<double>& v) {
        if (v && !std::isfinite(*v)) hard(path, "value is not finite");
    }
    void range(const std::string& path, const std::optional<double>& v, double lo, double hi) {
        if (!v) return;
        if (!std::isfinite(*v)) {
            hard(path, "value is not finite");
        } else if (*v < lo || *v > hi) {
            hard(path, "value " + format_number(*v) + " outside [" + format_number(lo) + ", " + format_number(hi) + "]");
        }
    }
    void at_least(const std::string& path, const std::optional<double>& v, double lo) {
        if (!v) return;
        if (!std::isfinite(*v)) {
            hard(path, "value is not finite");
        } else if (*v < lo) {
            hard(path, "value " + format_number(*v) + " below " + format_number(lo));
        }
    }
    void fraction(const std::string& path, const std::optional<double>& v) { range(path, v, 0.0, 1.0); }
    void code(const std::string& path, const std::optional<std::string>& v) {
        if (v && !valid_code(*v)) hard(path, "code '" + *v + "' contains reserved characters");
    }
    void extras(const std::string& dim, const Extras& ex) {
        std::set<std::string> seen;
        for (const auto& [k, v] : ex) {
            if (!valid_key(k) || !seen.insert(k).second) hard(dim + "." + k, "invalid or duplicate extra key");
            int depth = 0;
            bool ok = !v.empty();
            for (char c : v) {
                if (c == '(') ++depth;
                else if (c == ')') --depth;
                else if (is_space(c) || (depth == 0 && (c == ',' || c == '|'))) ok = false;
                if (depth < 0) ok = false;
            }
            if (!ok || depth != 0) hard(dim + "." + k, "extra value cannot be re-serialized");
        }
    }
    void composition(const std::string& path, const std::optional<CompositionToken>& tok) {
        if (!tok) return;
        if (tok->ambiguous) {
            soft(path, "ambiguous composition token '" + tok->raw + "'; parts not inferred");
            return;
        }
        if (tok->parts.empty()) {
            hard(path, "composition token has no parts");
            return;
        }
        std::set<char> letters;
        double sum = 0.0;
        for (const auto& [letter, frac] : tok->parts) {
            if (!is_alpha(letter)) hard(path, "composition code must be a letter");
            if (!letters.insert(letter).second) hard(path, std::string("duplicate composition letter ") + letter);
            if (!std::isfinite(frac) || frac < 0.0 || frac > 1.0) hard(path, "composition fraction outside [0, 1]");
            sum += frac;
        }
        if (sum < 0.95 || sum > 1.05) hard(path, "composition fractions sum to " + format_number(sum));
    }

    std::vector<Violation> out;
};

}  // namespace

std::string_view to_string(ParseErrorKind kind) {
    switch (kind) {
        case ParseErrorKind::MalformedDimension: return "MalformedDimension";
        case ParseErrorKind::MalformedEntry: return "MalformedEntry";
        case ParseErrorKind::UnterminatedString: return "UnterminatedString";
    }
    return "ParseError";
}

std::string_view to_string(Severity severity) { return severity == Severity::Hard ? "hard" : "soft"; }

ParseError::ParseError(ParseErrorKind kind, std::size_t position, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + " at byte " + std::to_string(position) + ": " + detail),
      kind_(kind),
      position_(position) {}

std::string format_number(double value) {
    std::array<char, 512> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed);
    if (ec != std::errc()) {
        ptr = std::to_chars(buf.data(), buf.data() + buf.size(), value).ptr;
    }
    return std::string(buf.data(), ptr);
}

DqlRecord parse_dql(std::string_view text) {
    const CompactText input = compact(text);
    return Parser(input).run();
}

std::string serialize_dql(const DqlRecord& r) {
    const auto violations = validate(r);
    for (const Violation& v : violations) {
        if (v.severity == Severity::Hard) throw InvalidRecord("cannot serialize: " + v.path + ": " + v.message);
    }
    Writer w;
    if (const auto& d = r.population) {
        w.begin("P");
        w.num("pop", d->pop);
        w.num("age0_14", d->age0_14);
        w.num("age15_64", d->age15_64);
        w.num("age65_up", d->age65_up);
        w.num("growth_rate", d->growth_rate);
        w.num("gender", d->gender);
        w.extras(d->extras);
    }
    if (const auto& d = r.health) {
        w.begin("H");
        w.diseases(d->diseases);
        w.code("risk", d->risk);
        w.extras(d->extras);
    }
    if (const auto& d = r.culture) {
        w.begin("C");
        w.comp("rel", d->rel);
        w.code("sexsep", d->sexsep);
        w.num("trad", d->trad);
        w.code("hol", d->hol);
        w.extras(d->extras);
    }
    if (const auto& d = r.maternal) {
        w.begin("M");
        w.num("fert", d->fert);
        w.num("mar", d->mar);
        w.num("health", d->health);
        w.extras(d->extras);
    }
    if (const auto& d = r.existing) {
        w.begin("E");
        w.num("total_beds", d->total_beds);
        w.num("quality_factor", d->quality_factor);
        w.num("or_rooms", d->or_rooms);
        w.extras(d->extras);
    }
    if (const auto& d = r.infrastructure) {
        w.begin("I");
        w.num("fac", d->fac);
        w.num("water", d->water);
        w.num("infra", d->infra);
        w.extras(d->extras);
    }
    if (const auto& d = r.social) {
        w.begin("S");
        w.code("conflict", d->conflict);
        w.num("ref", d->ref);
        w.num("vio", d->vio);
        w.num("trust", d->trust);
        w.extras(d->extras);
    }
    if (const auto& d = r.economy) {
        w.begin("X");
        w.num("gdp", d->gdp);
        w.num("pov", d->pov);
        w.comp("emp", d->emp);
        w.num("budget", d->budget);
        w.extras(d->extras);
    }
    if (const auto& d = r.geoclimate) {
        w.begin("G");
        w.num("temp", d->temp);
        w.num("rain", d->rain);
        w.code("disrisk", d->disrisk);
        w.code("mat", d->mat);
        w.code("construct_pref", d->construct_pref);
        w.extras(d->extras);
    }
    if (const auto& d = r.site) {
        w.begin("SITE");
        w.num("size", d->size);
        w.code("access", d->access);
        w.code("utilities", d->utilities);
        w.code("topography", d->topography);
        w.extras(d->extras);
    }
    return w.finish();
}

std::vector<Violation> validate(const DqlRecord& r) {
    Checker c;

    if (!r.population) {
        c.hard("population", "population dimension P is required");
    } else {
        const Population& p = *r.population;
        if (!p.pop) {
            c.hard("population.pop", "population size is required");
        } else if (!std::isfinite(*p.pop) || *p.pop <= 0.0) {
            c.hard("population.pop", "population must be positive");
        }
        c.range("population.growth_rate", p.growth_rate, -10.0, 15.0);
        c.fraction("population.age0_14", p.age0_14);
        c.fraction("population.age15_64", p.age15_64);
        c.fraction("population.age65_up", p.age65_up);
        if (p.age0_14 && p.age15_64 && p.age65_up) {
            const double sum = *p.age0_14 + *p.age15_64 + *p.age65_up;
            if (!(sum >= 0.98 && sum <= 1.02)) c.hard("population.age*", "age fractions sum to " + format_number(sum));
        }
        if (p.gender && (!std::isfinite(*p.gender) || *p.gender <= 0.0)) c.hard("population.gender", "gender ratio must be positive");
        c.extras("population", p.extras);
    }

    if (!r.health) {
        c.soft("health", "health profile defaulted to no disease burden");
    } else {
        const Health& h = *r.health;
        if (h.diseases) {
            if (h.diseases->empty()) c.hard("health.dis", "disease list is empty");
            for (std::size_t i = 0; i < h.diseases->size(); ++i) {
                const DiseaseEntry& d = (*h.diseases)[i];
                const std::string path = "health.dis[" + std::to_string(i) + "]";
                if (!is_upper(d.code)) c.hard(path + ".code", "disease code must be one uppercase letter");
                c.at_least(path + ".inc", d.incidence, 0.0);
                c.fraction(path + ".res", d.resource_factor);
                std::set<std::string> seen{"inc", "res"};
                for (const auto& [k, v] : d.extras) {
                    double parsed = 0.0;
                    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
                    if (!valid_key(k) || !seen.insert(k).second || ec != std::errc() || ptr != v.data() + v.size()) {
                        c.hard(path + "." + k, "invalid extra disease field");
                    }
                }
            }
        }
        c.code("health.risk", h.risk);
        c.extras("health", h.extras);
        if (!h.diseases && !h.risk && h.extras.empty()) c.hard("health", "dimension present but empty");
    }

    if (const auto& d = r.culture) {
        c.composition("culture.rel", d->rel);
        c.code("culture.sexsep", d->sexsep);
        c.fraction("culture.trad", d->trad);
        c.code("culture.hol", d->hol);
        c.extras("culture", d->extras);
        if (!d->rel && !d->sexsep && !d->trad && !d->hol && d->extras.empty()) c.hard("culture", "dimension present but empty");
    }

    if (!r.maternal) {
        c.soft("maternal", "maternal indicators defaulted");
    } else {
        const Maternal& m = *r.maternal;
        c.at_least("maternal.fert", m.fert, 0.0);
        c.at_least("maternal.mar", m.mar, 0.0);
        c.range("maternal.health", m.health, 0.0, 100.0);
        c.extras("maternal", m.extras);
        if (!m.fert && !m.mar && !m.health && m.extras.empty()) c.hard("maternal", "dimension present but empty");
    }

    if (!r.existing) {
        c.soft("existing", "existing resources defaulted to zero");
    } else {
        const Existing& e = *r.existing;
        c.at_least("existing.total_beds", e.total_beds, 0.0);
        c.fraction("existing.quality_factor", e.quality_factor);
        c.at_least("existing.or_rooms", e.or_rooms, 0.0);
        c.extras("existing", e.extras);
        if (!e.total_beds && !e.quality_factor && !e.or_rooms && e.extras.empty()) c.hard("existing", "dimension present but empty");
    }

    if (!r.infrastructure) {
        c.soft("infrastructure", "infrastructure indices defaulted");
    } else {
        const Infrastructure& i = *r.infrastructure;
        c.fraction("infrastructure.fac", i.fac);
        c.fraction("infrastructure.water", i.water);
        c.fraction("infrastructure.infra", i.infra);
        c.extras("infrastructure", i.extras);
        if (!i.fac && !i.water && !i.infra && i.extras.empty()) c.hard("infrastructure", "dimension present but empty");
    }

    if (!r.social) {
        c.soft("social", "social environment defaulted");
    } else {
        const Social& s = *r.social;
        c.code("social.conflict", s.conflict);
        c.fraction("social.ref", s.ref);
        c.fraction("social.vio", s.vio);
        c.fraction("social.trust", s.trust);
        c.extras("social", s.extras);
        if (!s.conflict && !s.ref && !s.vio && !s.trust && s.extras.empty()) c.hard("social", "dimension present but empty");
    }

    if (!r.economy) {
        c.hard("economy", "economy dimension X is required");
    } else {
        const Economy& x = *r.economy;
        if (!x.budget) c.hard("economy.budget", "construction budget is required");
        c.at_least("economy.budget", x.budget, 0.0);
        if (!x.gdp) c.soft("economy.gdp", "GDP per capita defaulted");
        c.at_least("economy.gdp", x.gdp, 0.0);
        c.fraction("economy.pov", x.pov);
        c.composition("economy.emp", x.emp);
        c.extras("economy", x.extras);
    }

    if (!r.geoclimate) {
        c.soft("geoclimate", "construction material defaulted");
    } else {
        const Geoclimate& g = *r.geoclimate;
        c.finite("geoclimate.temp", g.temp);
        c.at_least("geoclimate.rain", g.rain, 0.0);
        c.code("geoclimate.disrisk", g.disrisk);
        c.code("geoclimate.mat", g.mat);
        c.code("geoclimate.construct_pref", g.construct_pref);
        c.extras("geoclimate", g.extras);
        if (!g.temp && !g.rain && !g.disrisk && !g.mat && !g.construct_pref && g.extras.empty()) {
            c.hard("geoclimate", "dimension present but empty");
        }
    }

    if (const auto& s = r.site) {
        if (s->size && (!std::isfinite(*s->size) || *s->size <= 0.0)) c.hard("site.size", "site area must be positive");
        c.code("site.access", s->access);
        c.code("site.utilities", s->utilities);
        c.code("site.topography", s->topography);
        c.extras("site", s->extras);
        if (!s->size && !s->access && !s->utilities && !s->topography && s->extras.empty()) c.hard("site", "dimension present but empty");
    }

    return std::move(c.out);
}

bool has_hard_violation(const std::vector<Violation>& violations) {
    return std::any_of(violations.begin(), violations.end(),
                       [](const Violation& v) { return v.severity == Severity::Hard; });
}

}  // namespace medbuild::dql
