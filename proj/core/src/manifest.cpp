#include "hfree/manifest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "hfree/constructions.hpp"
#include "hfree/jets.hpp"

namespace hfree {

ManifestError::ManifestError(std::size_t line, std::size_t column, const std::string& message)
    : Error(line == 0 ? "manifest: " + message
                      : "manifest:" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

std::string_view to_string(CheckMode mode) noexcept {
    switch (mode) {
        case CheckMode::Immersion: return "immersion";
        case CheckMode::Free: return "free";
        case CheckMode::Identity: return "identity";
        case CheckMode::BracketLaws: return "bracket-laws";
    }
    return "immersion";
}

namespace {

// ---------------------------------------------------------------------------
// Syntax
// ---------------------------------------------------------------------------

struct Value {
    enum class Kind { String, Number, Bool, Array };
    Kind kind = Kind::String;
    std::string text;  // string contents or number literal
    bool boolean = false;
    std::vector<Value> items;
    std::size_t line = 0;
    std::size_t column = 0;
};

struct Entry {
    std::string key;
    Value value;
    std::size_t line = 0;
    std::size_t column = 0;
    mutable bool used = false;
};

struct Section {
    std::string name;
    std::size_t line = 0;
    std::size_t column = 0;
    std::vector<Entry> entries;
};

bool is_key_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

class Reader {
public:
    explicit Reader(std::string_view src) : src_(src) {}

    std::vector<Section> document() {
        std::vector<Section> sections;
        for (;;) {
            skip_space(true);
            if (eof()) break;
            if (peek() == '[') {
                Section s;
                s.line = line_;
                s.column = column_;
                advance();
                skip_space(false);
                s.name = key();
                skip_space(false);
                if (peek() != ']') fail("expected ']' closing the section name");
                advance();
                end_of_line();
                for (const auto& other : sections) {
                    if (other.name == s.name) {
                        throw ManifestError(s.line, s.column, "duplicate section [" + s.name + "]");
                    }
                }
                sections.push_back(std::move(s));
                continue;
            }
            Entry e;
            e.line = line_;
            e.column = column_;
            e.key = key();
            if (sections.empty()) throw ManifestError(e.line, e.column, "key '" + e.key + "' outside of a section");
            for (const auto& other : sections.back().entries) {
                if (other.key == e.key) {
                    throw ManifestError(e.line, e.column, "duplicate key '" + e.key + "'");
                }
            }
            skip_space(false);
            if (peek() != '=') fail("expected '=' after key '" + e.key + "'");
            advance();
            skip_space(false);
            e.value = value();
            end_of_line();
            sections.back().entries.push_back(std::move(e));
        }
        return sections;
    }

private:
    bool eof() const { return pos_ >= src_.size(); }
    char peek() const { return eof() ? '\0' : src_[pos_]; }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    [[noreturn]] void fail(const std::string& message) const { throw ManifestError(line_, column_, message); }

    void skip_space(bool newlines) {
        while (!eof()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || (newlines && c == '\n')) {
                advance();
            } else if (c == '#') {
                while (!eof() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    void end_of_line() {
        skip_space(false);
        if (!eof() && peek() != '\n') fail("unexpected text after value");
    }

    std::string key() {
        std::string k;
        while (!eof() && is_key_char(peek())) {
            k.push_back(peek());
            advance();
        }
        if (k.empty()) fail("expected a key or a [section]");
        return k;
    }

    Value value() {
        Value v;
        v.line = line_;
        v.column = column_;
        const char c = peek();
        if (c == '"') {
            advance();
            for (;;) {
                if (eof() || peek() == '\n') fail("unterminated string");
                char ch = peek();
                advance();
                if (ch == '"') break;
                if (ch == '\\') {
                    if (eof()) fail("unterminated string");
                    const char esc = peek();
                    advance();
                    if (esc == '"' || esc == '\\') {
                        ch = esc;
                    } else {
                        fail(std::string("unknown escape '\\") + esc + "'");
                    }
                }
                v.text.push_back(ch);
            }
            v.kind = Value::Kind::String;
        } else if (c == '[') {
            v.kind = Value::Kind::Array;
            advance();
            skip_space(true);
            if (peek() == ']') {
                advance();
                return v;
            }
            for (;;) {
                v.items.push_back(value());
                skip_space(true);
                if (peek() == ',') {
                    advance();
                    skip_space(true);
                    if (peek() == ']') {
                        advance();
                        break;
                    }
                    continue;
                }
                if (peek() == ']') {
                    advance();
                    break;
                }
                fail(eof() ? "unterminated array" : "expected ',' or ']' in array");
            }
        } else if ((c >= '0' && c <= '9') || c == '-' || c == '+' || c == '.') {
            v.kind = Value::Kind::Number;
            while (!eof()) {
                const char d = peek();
                if (!((d >= '0' && d <= '9') || d == '-' || d == '+' || d == '.' || d == 'e' || d == 'E')) break;
                v.text.push_back(d);
                advance();
            }
            const std::string_view t = v.text.front() == '+' ? std::string_view(v.text).substr(1) : v.text;
            double x = 0.0;
            const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
            if (ec != std::errc{} || end != t.data() + t.size()) {
                throw ManifestError(v.line, v.column, "malformed number '" + v.text + "'");
            }
        } else if (c >= 'a' && c <= 'z') {
            const std::string word = key();
            if (word == "true" || word == "false") {
                v.kind = Value::Kind::Bool;
                v.boolean = word == "true";
            } else {
                throw ManifestError(v.line, v.column,
                                    "expected a value (string, number, true/false or array), found '" + word +
                                        "'; expressions must be quoted");
            }
        } else {
            fail("expected a value (string, number, true/false or array)");
        }
        return v;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

// ---------------------------------------------------------------------------
// Typed access
// ---------------------------------------------------------------------------

[[noreturn]] void fail_at(const Value& v, const std::string& message) {
    throw ManifestError(v.line, v.column, message);
}

const std::string& as_string(const Value& v, std::string_view what) {
    if (v.kind != Value::Kind::String) fail_at(v, std::string(what) + " must be a quoted string");
    return v.text;
}

const std::vector<Value>& as_array(const Value& v, std::string_view what) {
    if (v.kind != Value::Kind::Array) fail_at(v, std::string(what) + " must be an array");
    return v.items;
}

bool as_bool(const Value& v, std::string_view what) {
    if (v.kind != Value::Kind::Bool) fail_at(v, std::string(what) + " must be true or false");
    return v.boolean;
}

Expr as_expr(const Value& v, std::string_view what) {
    const std::string& src = as_string(v, what);
    try {
        return parse(src);
    } catch (const ParseError& e) {
        // The string body starts one column after the opening quote.
        throw ManifestError(v.line, v.column + 1 + e.position(), std::string(what) + ": " + e.what());
    }
}

Expr as_expr(const Value& v, std::string_view what, const Chart& chart) {
    Expr e = as_expr(v, what);
    try {
        chart.require_vars(e, what);
    } catch (const DimensionError& err) {
        fail_at(v, err.what());
    }
    return e;
}

/// A number, or a quoted constant expression such as "2*pi".
double as_real(const Value& v, std::string_view what) {
    if (v.kind == Value::Kind::Number) {
        const std::string_view t = v.text.front() == '+' ? std::string_view(v.text).substr(1) : v.text;
        double x = 0.0;
        std::from_chars(t.data(), t.data() + t.size(), x);
        return x;
    }
    if (v.kind == Value::Kind::String) {
        const Expr e = as_expr(v, what);
        if (!free_vars(e).empty()) fail_at(v, std::string(what) + " must be a constant expression");
        try {
            return eval(e, {});
        } catch (const EvalError& err) {
            fail_at(v, std::string(what) + ": " + err.what());
        }
    }
    fail_at(v, std::string(what) + " must be a number");
}

std::uint64_t as_uint(const Value& v, std::string_view what) {
    std::uint64_t x = 0;
    if (v.kind == Value::Kind::Number) {
        const std::string_view t = v.text.front() == '+' ? std::string_view(v.text).substr(1) : v.text;
        const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
        if (ec == std::errc{} && end == t.data() + t.size()) return x;
    }
    fail_at(v, std::string(what) + " must be a non-negative integer");
}

std::vector<Expr> expr_list(const Value& v, std::string_view what, const Chart& chart) {
    std::vector<Expr> out;
    for (const auto& item : as_array(v, what)) out.push_back(as_expr(item, what, chart));
    return out;
}

class Sections {
public:
    explicit Sections(std::vector<Section> sections) : sections_(std::move(sections)) {
        for (const auto& s : sections_) {
            if (s.name != "manifold" && s.name != "frame" && s.name != "map" && s.name != "check") {
                throw ManifestError(s.line, s.column, "unknown section [" + s.name + "]");
            }
        }
    }

    const Section* section(std::string_view name) const {
        for (const auto& s : sections_) {
            if (s.name == name) return &s;
        }
        return nullptr;
    }

    const Section& require(std::string_view name) const {
        if (const Section* s = section(name)) return *s;
        throw ManifestError(0, 0, "missing section [" + std::string(name) + "]");
    }

    const Value* find(std::string_view sec, std::string_view key) const {
        const Section* s = section(sec);
        if (!s) return nullptr;
        for (const auto& e : s->entries) {
            if (e.key == key) {
                e.used = true;
                return &e.value;
            }
        }
        return nullptr;
    }

    const Value& get(std::string_view sec, std::string_view key) const {
        if (const Value* v = find(sec, key)) return *v;
        const Section& s = require(sec);
        throw ManifestError(s.line, s.column,
                            "section [" + std::string(sec) + "] is missing key '" + std::string(key) + "'");
    }

    void reject(std::string_view sec, std::string_view why) const {
        if (const Section* s = section(sec)) throw ManifestError(s->line, s->column, std::string(why));
    }

    void require_all_used() const {
        for (const auto& s : sections_) {
            for (const auto& e : s.entries) {
                if (!e.used) {
                    throw ManifestError(e.line, e.column,
                                        "unexpected key '" + e.key + "' in [" + s.name + "] for this manifest");
                }
            }
        }
    }

private:
    std::vector<Section> sections_;
};

// ---------------------------------------------------------------------------
// Semantic assembly
// ---------------------------------------------------------------------------

CheckMode parse_mode(const Value& v) {
    const std::string& m = as_string(v, "mode");
    if (m == "immersion") return CheckMode::Immersion;
    if (m == "free") return CheckMode::Free;
    if (m == "identity") return CheckMode::Identity;
    if (m == "bracket-laws") return CheckMode::BracketLaws;
    fail_at(v, "unknown mode '" + m + "' (immersion, free, identity, bracket-laws)");
}

Chart parse_chart(const Sections& s) {
    const Value& coords_v = s.get("manifold", "coords");
    std::vector<std::string> coords;
    for (const auto& c : as_array(coords_v, "coords")) coords.push_back(as_string(c, "coordinate name"));
    const std::size_t m = coords.size();
    if (m == 0) fail_at(coords_v, "coords must not be empty");

    if (const Value* dim = s.find("manifold", "dim")) {
        if (as_uint(*dim, "dim") != m) fail_at(*dim, "dim disagrees with the number of coords");
    }

    std::vector<bool> periodic(m, false);
    if (const Value* p = s.find("manifold", "periodic")) {
        const auto& items = as_array(*p, "periodic");
        if (items.size() != m) fail_at(*p, "periodic needs one entry per coordinate");
        for (std::size_t i = 0; i < m; ++i) periodic[i] = as_bool(items[i], "periodic entry");
    }

    std::vector<Interval> box;
    for (std::size_t i = 0; i < m; ++i) box.push_back(periodic[i] ? Interval{0.0, kTwoPi} : Interval{-2.0, 2.0});
    const Value* b = s.find("manifold", "box");
    if (b) {
        const auto& items = as_array(*b, "box");
        if (items.size() != m) fail_at(*b, "box needs one [lo, hi] pair per coordinate");
        for (std::size_t i = 0; i < m; ++i) {
            const auto& pair = as_array(items[i], "box entry");
            if (pair.size() != 2) fail_at(items[i], "box entry must be [lo, hi]");
            box[i] = {as_real(pair[0], "box bound"), as_real(pair[1], "box bound")};
        }
    }
    try {
        return Chart(std::move(coords), std::move(periodic), std::move(box));
    } catch (const Error& e) {
        fail_at(b ? *b : coords_v, e.what());
    }
}

Frame rebase(const Frame& frame, const Chart& chart) {
    std::vector<VectorField> vectors;
    for (const auto& v : frame.vectors()) vectors.emplace_back(chart, v.components());
    return Frame(chart, std::move(vectors));
}

struct FrameSection {
    std::optional<Frame> frame;
    std::optional<PoissonStructure> structure;
};

FrameSection parse_frame(const Sections& s, const Chart& chart, const Value* kind_v, std::size_t contact_n) {
    FrameSection out;
    const std::size_t m = chart.dim();
    const Value* vectors_v = s.find("frame", "vectors");
    if (vectors_v) {
        std::vector<VectorField> vectors;
        for (const auto& vec : as_array(*vectors_v, "vectors")) {
            auto comps = expr_list(vec, "frame component", chart);
            if (comps.size() != m) fail_at(vec, "each frame vector needs " + std::to_string(m) + " components");
            vectors.emplace_back(chart, std::move(comps));
        }
        if (vectors.empty() || vectors.size() > m) {
            fail_at(*vectors_v, "a frame needs between 1 and " + std::to_string(m) + " vectors");
        }
        out.frame = Frame(chart, std::move(vectors));
    }
    if (!kind_v) {
        if (!vectors_v) s.get("frame", "vectors");
        return out;
    }

    const std::string& kind = as_string(*kind_v, "structure");
    std::optional<Frame> generated;
    const Value* generator = nullptr;
    try {
        if (kind == "canonical") {
            std::size_t n = m / 2;
            if (const Value* nv = s.find("frame", "n")) n = as_uint(*nv, "n");
            const SymplecticChart sym(chart, n);
            out.structure = sym;
            if ((generator = s.find("frame", "hamiltonians"))) {
                std::vector<VectorField> vectors;
                for (const auto& h : expr_list(*generator, "hamiltonian", chart)) {
                    vectors.push_back(hamiltonian_field(sym, h));
                }
                if (vectors.empty() || vectors.size() > m) fail_at(*generator, "hamiltonians must not be empty");
                generated = Frame(chart, std::move(vectors));
            }
        } else if (kind == "riemann-poisson") {
            const Value* h_v = s.find("frame", "H");
            const Value* g_v = s.find("frame", "H_gradients");
            if ((h_v == nullptr) == (g_v == nullptr)) fail_at(*kind_v, "riemann-poisson needs exactly one of H, H_gradients");
            std::optional<RPStructure> rp;
            if (h_v) {
                const auto hs = expr_list(*h_v, "H entry", chart);
                if (hs.size() + 2 != m) fail_at(*h_v, "H needs exactly m - 2 = " + std::to_string(m - 2) + " functions");
                rp = RPStructure(chart, hs);
            } else {
                std::vector<std::vector<Expr>> grads;
                for (const auto& row : as_array(*g_v, "H_gradients")) {
                    grads.push_back(expr_list(row, "gradient component", chart));
                    if (grads.back().size() != m) fail_at(row, "each gradient needs " + std::to_string(m) + " components");
                }
                if (grads.size() + 2 != m) fail_at(*g_v, "H_gradients needs exactly m - 2 rows");
                rp = RPStructure::from_gradients(chart, std::move(grads));
            }
            out.structure = *rp;
            const Value* sign_v = s.find("frame", "sign");
            if ((generator = s.find("frame", "hamiltonian"))) {
                int sign = 1;
                if (sign_v) {
                    if (sign_v->kind != Value::Kind::Number || (sign_v->text != "1" && sign_v->text != "-1" &&
                                                                sign_v->text != "+1")) {
                        fail_at(*sign_v, "sign must be 1 or -1");
                    }
                    sign = sign_v->text == "-1" ? -1 : 1;
                }
                const Expr h = as_expr(*generator, "hamiltonian", chart);
                generated = Frame(chart, {rp_hamiltonian_field(*rp, h, sign)});
            } else if (sign_v) {
                fail_at(*sign_v, "sign is only meaningful together with hamiltonian");
            }
        } else if (kind == "contact") {
            generator = kind_v;
            generated = rebase(contact_frame(contact_n), chart);
        } else {
            fail_at(*kind_v, "unknown structure '" + kind + "' (canonical, riemann-poisson, contact)");
        }
    } catch (const ManifestError&) {
        throw;
    } catch (const Error& e) {
        fail_at(*kind_v, e.what());
    }
    if (generated) {
        if (out.frame) fail_at(*generator, "frame given twice: vectors and a structure-generated frame");
        out.frame = std::move(generated);
    }
    return out;
}

std::size_t parse_contact_n(const Sections& s) {
    const Value& v = s.get("frame", "n");
    const std::uint64_t n = as_uint(v, "n");
    if (n == 0 || n > 8) fail_at(v, "contact n must be between 1 and 8");
    return static_cast<std::size_t>(n);
}

Chart contact_chart(std::size_t n) { return contact_frame(n).chart(); }

}  // namespace

Manifest parse_manifest(std::string_view text) {
    const Sections s(Reader(text).document());

    const Value& mode_v = s.get("check", "mode");
    const CheckMode mode = parse_mode(mode_v);

    s.require("frame");
    const Value* kind_v = s.find("frame", "structure");
    const bool contact = kind_v && kind_v->kind == Value::Kind::String && kind_v->text == "contact";
    const std::size_t contact_n = contact ? parse_contact_n(s) : 0;

    std::optional<Chart> chart;
    if (s.section("manifold")) {
        chart = parse_chart(s);
        if (contact && !chart->compatible(contact_chart(contact_n))) {
            const Section& sec = s.require("manifold");
            throw ManifestError(sec.line, sec.column, "contact structure needs coords x1..xn, p1..pn, t");
        }
    } else if (contact) {
        chart = contact_chart(contact_n);
    } else {
        s.require("manifold");
    }

    FrameSection fs = parse_frame(s, *chart, kind_v, contact_n);

    Manifest out{*chart, std::move(fs.frame), std::nullopt, std::nullopt, std::move(fs.structure), {}, mode,
                 RandomPlan{}, kDefaultTolerance};

    if (mode == CheckMode::BracketLaws) {
        if (!out.structure) {
            fail_at(kind_v ? *kind_v : mode_v, "bracket-laws mode needs a canonical or riemann-poisson structure");
        }
        s.reject("map", "section [map] is not used in bracket-laws mode");
        const Value& fv = s.get("check", "functions");
        out.functions = expr_list(fv, "test function", *chart);
        if (out.functions.size() < 3) fail_at(fv, "bracket-laws needs at least 3 test functions");
    } else {
        if (!out.frame) {
            const Section& sec = s.require("frame");
            throw ManifestError(sec.line, sec.column, "mode " + std::string(to_string(mode)) + " needs a frame");
        }
        const Value& cv = s.get("map", "components");
        auto comps = expr_list(cv, "map component", *chart);
        if (comps.empty()) fail_at(cv, "map needs at least one component");
        out.map = SmoothMap(*chart, std::move(comps));

        const std::size_t k = out.frame->size();
        const std::size_t q = out.map->target_dim();
        const Value* outer_v = s.find("map", "outer");
        const Value* outer_coords_v = s.find("map", "outer_coords");
        if (mode == CheckMode::Identity) {
            if (q > k) fail_at(cv, "identity mode works in critical dimension: q must equal k = " + std::to_string(k));
            if (outer_v) {
                std::vector<std::string> names;
                if (outer_coords_v) {
                    for (const auto& c : as_array(*outer_coords_v, "outer_coords")) {
                        names.push_back(as_string(c, "outer coordinate"));
                    }
                } else {
                    for (std::size_t i = 0; i < q; ++i) names.push_back("x" + std::to_string(i + 1));
                }
                if (names.size() != q) {
                    fail_at(outer_coords_v ? *outer_coords_v : *outer_v,
                            "outer map needs one coordinate per inner component");
                }
                try {
                    const Chart outer_chart = Chart::euclidean(names);
                    out.outer = SmoothMap(outer_chart, expr_list(*outer_v, "outer component", outer_chart));
                } catch (const ManifestError&) {
                    throw;
                } catch (const Error& e) {
                    fail_at(*outer_v, e.what());
                }
                if (q == k && out.outer->target_dim() != critical_dimension(k, 2)) {
                    fail_at(*outer_v, "outer map needs k + s_k = " + std::to_string(critical_dimension(k, 2)) +
                                          " components");
                }
            } else if (outer_coords_v) {
                fail_at(*outer_coords_v, "outer_coords without outer");
            }
        } else if (outer_v) {
            fail_at(*outer_v, "outer is only used in identity mode");
        }
    }

    if (const Value* g = s.find("check", "grid")) {
        if (s.find("check", "samples") || s.find("check", "seed")) {
            fail_at(*g, "grid replaces samples and seed; give one or the other");
        }
        GridPlan plan;
        for (const auto& c : as_array(*g, "grid")) {
            const std::uint64_t n = as_uint(c, "grid count");
            if (n == 0) fail_at(c, "zero samples");
            plan.counts.push_back(static_cast<std::size_t>(n));
        }
        if (plan.counts.size() != chart->dim()) fail_at(*g, "grid needs one count per coordinate");
        out.plan = plan;
    } else {
        RandomPlan plan;
        if (const Value* v = s.find("check", "samples")) {
            plan.samples = static_cast<std::size_t>(as_uint(*v, "samples"));
            if (plan.samples == 0) fail_at(*v, "zero samples");
        }
        if (const Value* v = s.find("check", "seed")) plan.seed = as_uint(*v, "seed");
        out.plan = plan;
    }
    if (const Value* v = s.find("check", "tolerance")) {
        out.tolerance = as_real(*v, "tolerance");
        if (!(out.tolerance > 0.0) || !std::isfinite(out.tolerance)) fail_at(*v, "tolerance must be positive");
    }

    s.require_all_used();
    return out;
}

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ManifestError(0, 0, "cannot read '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_manifest(buf.str());
}

}  // namespace hfree
