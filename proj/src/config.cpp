#include "extenso/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace extenso {

namespace {

// ---------------------------------------------------------------------------
// Raw INI layer

struct Value {
    std::string text;
    int line = 0;
    int column = 0; // 1-based column of the first character of `text`
};

struct Entry {
    std::string key;
    Value value;
    int key_column = 1;
};

struct Section {
    std::string kind;
    std::string name;
    int line = 0;
    std::vector<Entry> entries;
};

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

int leading_spaces(std::string_view s)
{
    int n = 0;
    while (n < int(s.size()) && std::isspace(static_cast<unsigned char>(s[std::size_t(n)])))
        ++n;
    return n;
}

const std::set<std::string> kSectionKinds{"system", "constants", "domain", "form", "field", "check"};
const std::set<std::string> kNamedKinds{"form", "field", "check"};

std::vector<Section> read_sections(std::string_view text)
{
    std::vector<Section> sections;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view raw = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!raw.empty() && raw.back() == '\r')
            raw.remove_suffix(1);
        const int indent = leading_spaces(raw);
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') {
            if (end == text.size())
                break;
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigSyntaxError(fmt::format("line {}: expected ']' to close the section header", line_no),
                                        line_no, indent + int(line.size()) + 1);
            const std::string_view inner = trim(line.substr(1, line.size() - 2));
            const std::size_t split = inner.find_first_of(" \t");
            Section s;
            s.kind = std::string(inner.substr(0, split));
            s.name = split == std::string_view::npos ? "" : std::string(trim(inner.substr(split)));
            s.line = line_no;
            if (!kSectionKinds.count(s.kind))
                throw ConfigSemanticError(fmt::format("line {}: unknown section '{}'", line_no, s.kind), line_no,
                                          indent + 2, s.kind);
            if (kNamedKinds.count(s.kind) && s.name.empty())
                throw ConfigSyntaxError(fmt::format("line {}: section '{}' needs a name", line_no, s.kind), line_no,
                                        indent + 1);
            if (!kNamedKinds.count(s.kind) && !s.name.empty())
                throw ConfigSyntaxError(fmt::format("line {}: section '{}' takes no name", line_no, s.kind), line_no,
                                        indent + 1);
            for (const Section& other : sections)
                if (other.kind == s.kind && other.name == s.name)
                    throw ConfigSemanticError(
                        fmt::format("line {}: duplicate section [{}{}{}]", line_no, s.kind, s.name.empty() ? "" : " ",
                                    s.name),
                        line_no, indent + 1, s.name.empty() ? s.kind : s.name);
            sections.push_back(std::move(s));
        } else {
            const std::size_t eq = line.find('=');
            if (eq == std::string_view::npos)
                throw ConfigSyntaxError(fmt::format("line {}: expected 'key = value'", line_no), line_no,
                                        indent + int(line.size()) + 1);
            const std::string_view key = trim(line.substr(0, eq));
            if (key.empty())
                throw ConfigSyntaxError(fmt::format("line {}: missing key before '='", line_no), line_no, indent + 1);
            if (key.find_first_of(" \t") != std::string_view::npos)
                throw ConfigSyntaxError(fmt::format("line {}: key '{}' contains whitespace", line_no, key), line_no,
                                        indent + 1, std::string(key));
            if (sections.empty())
                throw ConfigSyntaxError(fmt::format("line {}: entry outside of any section", line_no), line_no,
                                        indent + 1, std::string(key));
            const std::string_view after = line.substr(eq + 1);
            Entry e;
            e.key = std::string(key);
            e.key_column = indent + 1;
            e.value.text = std::string(trim(after));
            e.value.line = line_no;
            e.value.column = indent + int(eq) + 2 + leading_spaces(after);
            for (const Entry& other : sections.back().entries)
                if (other.key == e.key)
                    throw ConfigSemanticError(fmt::format("line {}: duplicate key '{}'", line_no, e.key), line_no,
                                              e.key_column, e.key);
            sections.back().entries.push_back(std::move(e));
        }
        if (end == text.size())
            break;
    }
    return sections;
}

// ---------------------------------------------------------------------------
// Values

[[noreturn]] void semantic(const Entry& e, const std::string& message)
{
    throw ConfigSemanticError(fmt::format("line {}: {}: {}", e.value.line, e.key, message), e.value.line,
                              e.key_column, e.key);
}

// Column of the first whole-word occurrence of `name` in the value.
[[noreturn]] void undeclared(const Entry& e, const std::string& name)
{
    const std::string& t = e.value.text;
    auto word = [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; };
    int column = e.value.column;
    for (std::size_t at = t.find(name); at != std::string::npos; at = t.find(name, at + 1)) {
        const std::size_t end = at + name.size();
        if ((at == 0 || !word(t[at - 1])) && (end == t.size() || !word(t[end]))) {
            column += int(at);
            break;
        }
    }
    throw ConfigSemanticError(fmt::format("line {}: {}: undeclared identifier '{}'", e.value.line, e.key, name),
                              e.value.line, column, name);
}

[[noreturn]] void invalid(const Entry& e, const std::string& message)
{
    throw ConfigValidationError(fmt::format("line {}: {}: {}", e.value.line, e.key, message), e.value.line,
                                e.value.column, e.key);
}

// Parses an expression-valued entry and maps expression errors onto the
// config's line/column space.
expr::Expression parse_expression(const Entry& e, std::string_view text, int offset_in_value = 0)
{
    try {
        return expr::parse(text);
    } catch (const expr::ParseError& pe) {
        throw ConfigSyntaxError(fmt::format("line {}: {}: {}", e.value.line, e.key, pe.what()), e.value.line,
                                e.value.column + offset_in_value + int(pe.offset()), e.key);
    } catch (const expr::UnknownFunctionError& ue) {
        throw ConfigSemanticError(fmt::format("line {}: {}: {}", e.value.line, e.key, ue.what()), e.value.line,
                                  e.value.column + offset_in_value + int(ue.offset()), e.key);
    }
}

ScalarField build_field(const Entry& e, const std::vector<std::string>& vars,
                        const std::map<std::string, double>& constants, const Box& domain)
{
    const expr::Expression ex = parse_expression(e, e.value.text);
    for (const std::string& name : ex.free_vars())
        if (!constants.count(name) && std::find(vars.begin(), vars.end(), name) == vars.end())
            undeclared(e, name);
    return ScalarField::from_expression(ex, vars, constants, domain);
}

double eval_number(const Entry& e, std::string_view text, const std::map<std::string, double>& constants,
                   int offset_in_value = 0)
{
    const std::string_view t = trim(text);
    if (t == "inf" || t == "+inf")
        return std::numeric_limits<double>::infinity();
    if (t == "-inf")
        return -std::numeric_limits<double>::infinity();
    const expr::Expression ex = parse_expression(e, t, offset_in_value);
    for (const std::string& name : ex.free_vars())
        if (!constants.count(name))
            undeclared(e, name);
    try {
        return expr::CompiledExpression(ex, {}, constants).value({});
    } catch (const DomainError& de) {
        invalid(e, de.what());
    }
}

double number(const Entry& e, const std::map<std::string, double>& constants)
{
    return eval_number(e, e.value.text, constants);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t at = s.find(sep, start);
        out.push_back(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
        if (at == std::string_view::npos)
            break;
        start = at + 1;
    }
    return out;
}

std::vector<double> number_list(const Entry& e, const std::map<std::string, double>& constants)
{
    std::vector<double> out;
    int offset = 0;
    for (std::string_view part : split(e.value.text, ',')) {
        if (trim(part).empty())
            throw ConfigSyntaxError(fmt::format("line {}: {}: empty list element", e.value.line, e.key), e.value.line,
                                    e.value.column + offset, e.key);
        out.push_back(eval_number(e, part, constants, offset + leading_spaces(part)));
        offset += int(part.size()) + 1;
    }
    return out;
}

std::vector<std::string> name_list(const Entry& e)
{
    std::vector<std::string> out;
    for (std::string_view part : split(e.value.text, ',')) {
        const std::string_view t = trim(part);
        if (t.empty() || !(std::isalpha(static_cast<unsigned char>(t.front())) || t.front() == '_'))
            throw ConfigSyntaxError(fmt::format("line {}: {}: expected a list of identifiers", e.value.line, e.key),
                                    e.value.line, e.value.column, e.key);
        out.emplace_back(t);
    }
    return out;
}

Interval interval(const Entry& e, std::string_view text, int offset, const std::map<std::string, double>& constants)
{
    const std::string_view t = trim(text);
    if (t.size() < 2 || t.front() != '(' || t.back() != ')')
        throw ConfigSyntaxError(fmt::format("line {}: {}: expected an interval '(lo, hi)'", e.value.line, e.key),
                                e.value.line, e.value.column + offset, e.key);
    const std::vector<std::string_view> ends = split(t.substr(1, t.size() - 2), ',');
    if (ends.size() != 2)
        throw ConfigSyntaxError(fmt::format("line {}: {}: an interval has two ends", e.value.line, e.key),
                                e.value.line, e.value.column + offset, e.key);
    Interval i{eval_number(e, ends[0], constants, offset + 1), eval_number(e, ends[1], constants, offset + 1)};
    if (!(i.lo < i.hi))
        invalid(e, "interval must satisfy lo < hi");
    return i;
}

// "(lo, hi) (lo, hi) ..." with one interval per variable.
Box box_value(const Entry& e, int dim, const std::map<std::string, double>& constants)
{
    std::vector<Interval> sides;
    const std::string& s = e.value.text;
    std::size_t pos = 0;
    while (pos < s.size()) {
        if (std::isspace(static_cast<unsigned char>(s[pos]))) {
            ++pos;
            continue;
        }
        const std::size_t close = s.find(')', pos);
        if (s[pos] != '(' || close == std::string::npos)
            throw ConfigSyntaxError(fmt::format("line {}: {}: expected '(lo, hi)' groups", e.value.line, e.key),
                                    e.value.line, e.value.column + int(pos), e.key);
        sides.push_back(interval(e, std::string_view(s).substr(pos, close - pos + 1), int(pos), constants));
        pos = close + 1;
    }
    if (int(sides.size()) != dim)
        invalid(e, fmt::format("expected {} intervals, found {}", dim, sides.size()));
    return Box(std::move(sides));
}

// ---------------------------------------------------------------------------
// Typed sections

struct Keys {
    const Section& section;
    std::set<std::string> used;

    const Entry* find(const std::string& key)
    {
        for (const Entry& e : section.entries)
            if (e.key == key) {
                used.insert(key);
                return &e;
            }
        return nullptr;
    }

    const Entry& require(const std::string& key)
    {
        if (const Entry* e = find(key))
            return *e;
        throw ConfigSemanticError(fmt::format("line {}: [{}{}{}] is missing required key '{}'", section.line,
                                              section.kind, section.name.empty() ? "" : " ", section.name, key),
                                  section.line, 1, key);
    }

    void reject_unknown()
    {
        for (const Entry& e : section.entries)
            if (!used.count(e.key))
                semantic(e, "unknown key");
    }
};

struct Loader {
    SystemConfig cfg;
    std::map<std::string, double> constants;
    std::vector<std::string> vars;

    int var_index(const Entry& e, std::string_view name) const
    {
        const auto it = std::find(vars.begin(), vars.end(), name);
        if (it == vars.end())
            semantic(e, fmt::format("unknown variable '{}'", name));
        return int(it - vars.begin());
    }

    Point point(const Entry& e) const
    {
        const std::vector<double> p = number_list(e, constants);
        if (int(p.size()) != int(vars.size()))
            invalid(e, fmt::format("expected {} coordinates, found {}", vars.size(), p.size()));
        return p;
    }

    ScalarField function(Keys& k) const
    {
        const Entry* e = k.find("function");
        if (!e || e->value.text == "entropy")
            return cfg.system.entropy;
        return build_field(*e, vars, constants, cfg.system.domain);
    }

    KForm form(Keys& k, const char* fallback) const
    {
        const Entry* e = k.find("form");
        const std::string name = e ? e->value.text : fallback;
        const auto it = cfg.forms.find(name);
        if (it == cfg.forms.end())
            semantic(*e, fmt::format("unknown form '{}'", name));
        return it->second;
    }

    VectorField field(Keys& k) const
    {
        const Entry* e = k.find("field");
        const std::string name = e ? e->value.text : "rho";
        const auto it = cfg.fields.find(name);
        if (it == cfg.fields.end())
            semantic(*e, fmt::format("unknown field '{}'", name));
        return it->second;
    }

    void load_system(const Section& s, const Section* constants_section, const Section* domain_section);
    void load_form(const Section& s);
    void load_field(const Section& s);
    void load_check(const Section& s);
};

void Loader::load_system(const Section& s, const Section* constants_section, const Section* domain_section)
{
    Keys k{s, {}};
    const Entry* model = k.find("model");
    cfg.model = model ? model->value.text : "custom";
    cfg.name = k.find("name") ? k.find("name")->value.text : cfg.model;

    std::vector<std::string> required_constants;
    std::string equation;
    if (cfg.model == "ideal_gas") {
        required_constants = {"c", "K1", "R"};
        equation = kIdealGasEntropy;
    } else if (cfg.model == "van_der_waals") {
        required_constants = {"a", "b", "c", "K2", "R"};
        equation = kVanDerWaalsEntropy;
    } else if (cfg.model != "custom") {
        semantic(*model, fmt::format("unknown model '{}' (expected ideal_gas, van_der_waals or custom)", cfg.model));
    }

    if (const Entry* e = k.find("variables"))
        vars = name_list(*e);
    else if (cfg.model == "custom")
        k.require("variables");
    else
        vars = {"U", "V", "N"};
    if (cfg.model != "custom" && vars != std::vector<std::string>{"U", "V", "N"})
        semantic(*k.find("variables"), "built-in models use the variables U, V, N");
    if (std::set<std::string>(vars.begin(), vars.end()).size() != vars.size())
        semantic(*k.find("variables"), "variable names must be distinct");
    const int dim = int(vars.size());

    // Constants, in declaration order; each may use the earlier ones.
    if (constants_section) {
        for (const Entry& e : constants_section->entries) {
            if (std::find(vars.begin(), vars.end(), e.key) != vars.end())
                semantic(e, "a constant may not shadow a variable");
            constants[e.key] = number(e, constants);
        }
    }
    for (const std::string& c : required_constants)
        if (!constants.count(c))
            throw ConfigSemanticError(
                fmt::format("line {}: model '{}' needs constant '{}'", s.line, cfg.model, c), s.line, 1, c);

    std::vector<Interval> sides(std::size_t(dim),
                                cfg.model == "custom" ? Interval{} : Interval{0.0});
    if (domain_section) {
        Keys d{*domain_section, {}};
        for (const Entry& e : domain_section->entries)
            sides[std::size_t(var_index(e, e.key))] = interval(e, e.value.text, 0, constants);
    }
    const Box domain(sides);

    const Entry* entropy = k.find("entropy");
    if (cfg.model == "custom") {
        const Entry& e = k.require("entropy");
        equation = e.value.text;
        build_field(e, vars, constants, domain); // reports undeclared names against the key
    } else if (entropy) {
        semantic(*entropy, "built-in models fix the fundamental equation");
    }
    int energy = 0;
    if (const Entry* e = k.find("energy"))
        energy = var_index(*e, e->value.text);

    if (const Entry* e = k.find("sample_box"))
        cfg.sample_box = box_value(*e, dim, constants);
    k.reject_unknown();

    cfg.system = make_system(cfg.name, vars, constants, equation, domain, energy);
    cfg.forms.emplace("heat", cfg.system.heat);
    cfg.forms.emplace("work", cfg.system.work);
    cfg.fields.emplace("rho", cfg.system.rho);
}

void Loader::load_form(const Section& s)
{
    if (cfg.forms.count(s.name))
        throw ConfigSemanticError(fmt::format("line {}: form '{}' is already defined", s.line, s.name), s.line, 1,
                                  s.name);
    const int dim = int(vars.size());
    int degree = -1;
    std::vector<std::pair<MultiIndex, ScalarField>> terms;
    for (const Entry& e : s.entries) {
        if (e.key == "degree") {
            degree = int(number(e, constants));
            continue;
        }
        // d(A,B,...) = coefficient
        if (e.key.size() < 3 || e.key.rfind("d(", 0) != 0 || e.key.back() != ')')
            semantic(e, "form keys are 'degree' or 'd(VAR,...)'");
        std::vector<int> slots;
        for (std::string_view v : split(std::string_view(e.key).substr(2, e.key.size() - 3), ','))
            slots.push_back(var_index(e, trim(v)));
        // Sort the slots, tracking the permutation's sign.
        int sign = 1;
        for (std::size_t i = 0; i < slots.size(); ++i)
            for (std::size_t j = 0; j + 1 < slots.size() - i; ++j)
                if (slots[j] > slots[j + 1]) {
                    std::swap(slots[j], slots[j + 1]);
                    sign = -sign;
                }
        if (std::adjacent_find(slots.begin(), slots.end()) != slots.end())
            semantic(e, "repeated variable in a wedge product");
        MultiIndex I = 0;
        for (int slot : slots)
            I |= MultiIndex(1) << slot;
        if (degree >= 0 && degree != int(slots.size()))
            semantic(e, "all terms of a form must have the same degree");
        degree = int(slots.size());
        for (const auto& [J, f] : terms)
            if (J == I)
                semantic(e, "multi-index given twice");
        terms.emplace_back(I, double(sign) * build_field(e, vars, constants, cfg.system.domain));
    }
    if (degree < 0)
        throw ConfigSemanticError(fmt::format("line {}: form '{}' has no terms and no degree", s.line, s.name),
                                  s.line, 1, s.name);
    if (degree > dim)
        throw ConfigValidationError(fmt::format("line {}: form '{}' has degree above the dimension", s.line, s.name),
                                    s.line, 1, "degree");
    KForm w(dim, degree);
    for (auto& [I, f] : terms)
        w.set(I, f);
    cfg.forms.emplace(s.name, std::move(w));
}

void Loader::load_field(const Section& s)
{
    if (cfg.fields.count(s.name))
        throw ConfigSemanticError(fmt::format("line {}: field '{}' is already defined", s.line, s.name), s.line, 1,
                                  s.name);
    const int dim = int(vars.size());
    std::vector<ScalarField> c(std::size_t(dim), ScalarField::constant(dim, 0.0).with_domain(cfg.system.domain));
    for (const Entry& e : s.entries)
        c[std::size_t(var_index(e, e.key))] = build_field(e, vars, constants, cfg.system.domain);
    cfg.fields.emplace(s.name, VectorField(std::move(c)));
}

// ---------------------------------------------------------------------------
// Checks

template <class F>
std::function<CheckReport(const RunContext&)> guarded(std::string name, double tol, F body)
{
    return [name, tol, body](const RunContext& ctx) {
        const double t = tol * ctx.tol_scale;
        try {
            CheckReport r = body(ctx, t);
            r.name = name;
            return r;
        } catch (const std::exception& e) {
            return failed_report(name, t, e.what());
        }
    };
}

void Loader::load_check(const Section& s)
{
    Keys k{s, {}};
    const Entry& kind_entry = k.require("kind");
    const std::string kind = kind_entry.value.text;
    const Entry& tol_entry = k.require("tol");
    const double tol = number(tol_entry, constants);
    if (!(tol > 0.0) || !std::isfinite(tol))
        invalid(tol_entry, "tolerance must be a positive number");
    int samples = 50;
    if (const Entry* e = k.find("samples")) {
        const double v = number(*e, constants);
        if (!(v >= 1.0) || v != std::floor(v))
            invalid(*e, "samples must be a positive integer");
        samples = int(v);
    }
    std::optional<std::uint64_t> seed;
    if (const Entry* e = k.find("seed")) {
        const double v = number(*e, constants);
        if (!(v >= 0.0) || v != std::floor(v))
            invalid(*e, "seed must be a non-negative integer");
        seed = std::uint64_t(v);
    }
    Box box = cfg.sample_box;
    if (const Entry* e = k.find("box"))
        box = box_value(*e, int(vars.size()), constants);

    auto need_box = [&]() {
        if (box.dim() == 0)
            throw ConfigSemanticError(
                fmt::format("line {}: check '{}' needs a sampling box (set 'box' or [system] sample_box)", s.line,
                            s.name),
                s.line, 1, "box");
    };
    auto spec = [box, samples, seed](const RunContext& ctx) { return SampleSpec{box, samples, seed.value_or(ctx.seed), {}}; };

    CheckSpec c;
    c.name = s.name;
    c.kind = kind;
    c.tol = tol;
    c.line = s.line;
    const ThermoSystem sys = cfg.system;

    if (kind == "extensive_function") {
        need_box();
        const ScalarField f = function(k);
        const VectorField rho = field(k);
        c.run = guarded(s.name, tol, [=](const RunContext& ctx, double t) {
            return check_extensive_function(f, rho, spec(ctx), t, "", ctx.execution);
        });
    } else if (kind == "degree") {
        need_box();
        const ScalarField f = function(k);
        const VectorField rho = field(k);
        const double beta = number(k.require("beta"), constants);
        c.run = guarded(s.name, tol, [=](const RunContext& ctx, double t) {
            return check_degree(f, rho, beta, spec(ctx), t, "", ctx.execution);
        });
    } else if (kind == "extensive_form") {
        need_box();
        const KForm w = form(k, "heat");
        const VectorField rho = field(k);
        c.run = guarded(s.name, tol, [=](const RunContext& ctx, double t) {
            return check_extensive_form(w, rho, spec(ctx), t, "", ctx.execution);
        });
    } else if (kind == "integrable") {
        need_box();
        const KForm w = form(k, "heat");
        if (w.degree() != 1)
            semantic(kind_entry, "integrability is checked for 1-forms");
        c.run = guarded(s.name, tol, [=](const RunContext& ctx, double t) {
            return check_integrable(w, spec(ctx), t, "", ctx.execution);
        });
    } else if (kind == "transversal") {
        need_box();
        const KForm w = form(k, "heat");
        const VectorField rho = field(k);
        if (w.degree() != 1)
            semantic(kind_entry, "transversality is checked for 1-forms");
        c.run = guarded(s.name, tol, [=](const RunContext& ctx, double t) {
            return check_transversal(w, rho, spec(ctx), t, "", ctx.execution);
        });
    } else if (kind == "scaling_law") {
        const KForm w = form(k, "heat");
        const VectorField rho = field(k);
        const Point p = point(k.require("point"));
        const std::vector<double> times = number_list(k.require("t"), constants);
        c.run = guarded(s.name, tol, [=](const RunContext&, double t) {
            ReportBuilder b("", t);
            for (double time : times)
                b.absorb(check_scaling_law(w, rho, p, time, t));
            return b.finish();
        });
    } else if (kind == "entropy_recovery") {
        need_box();
        const KForm w = form(k, "heat");
        const VectorField rho = field(k);
        const Point base = point(k.require("base"));
        c.run = guarded(s.name, tol, [=](const RunContext& ctx, double t) {
            const double s0 = sys.entropy(base);
            if (s0 == 0.0 || !std::isfinite(s0))
                throw PreconditionError(fmt::format("S(base) = {:.6g} must be finite and nonzero", s0));
            auto residual = [&](const Point& target) {
                const double direct = sys.entropy(target);
                const double recovered = recover_entropy(w, rho, base, s0, target).entropy;
                return std::abs(recovered - direct) / std::max(std::abs(direct), 1e-300);
            };
            return evaluate_check("", draw_samples(spec(ctx)), residual, t, ctx.execution);
        });
    } else if (kind == "work_wedge") {
        need_box();
        if (sys.dim() != 3)
            semantic(kind_entry, "the work wedge needs a three-dimensional system");
        c.run = guarded(s.name, tol, [=](const RunContext& ctx, double t) {
            auto residual = [&](const Point& p) { return work_wedge(sys, p).max_abs(); };
            return evaluate_check("", draw_samples(spec(ctx)), residual, t, ctx.execution);
        });
    } else if (kind == "quoted_vdw") {
        need_box();
        if (cfg.model != "van_der_waals")
            semantic(kind_entry, "the quoted closed form applies to the van_der_waals model");
        const auto& cs = constants;
        const double a = cs.at("a"), b = cs.at("b"), cc = cs.at("c"), r = cs.at("R");
        c.run = guarded(s.name, tol, [=](const RunContext& ctx, double t) {
            return compare_quoted_vdw(sys, a, b, cc, r, spec(ctx), t);
        });
    } else if (kind == "metric_scaling" || kind == "null_direction") {
        need_box();
        const Entry* m = k.find("metric");
        const std::string metric = m ? m->value.text : "ruppeiner";
        if (metric != "ruppeiner" && metric != "quevedo")
            semantic(*m, "metric must be ruppeiner or quevedo");
        const ScalarField f = function(k);
        const VectorField rho = field(k);
        const double beta = k.find("beta") ? number(*k.find("beta"), constants) : 1.0;
        const MetricField g = metric == "ruppeiner" ? ruppeiner_metric(f, beta) : quevedo_metric(f, beta);
        const bool null_dir = kind == "null_direction";
        c.run = guarded(s.name, tol, [=](const RunContext& ctx, double t) {
            return null_dir ? check_null_direction(g, rho, spec(ctx), t, ctx.execution)
                            : check_metric_scaling(g, rho, spec(ctx), t, ctx.execution);
        });
    } else if (kind == "level_set") {
        need_box();
        const ScalarField f = function(k);
        const VectorField rho = field(k);
        const Entry& level_entry = k.require("level");
        const double level = number(level_entry, constants);
        if (level == 0.0)
            invalid(level_entry, "the level must be nonzero");
        c.run = guarded(s.name, tol, [=](const RunContext& ctx, double t) {
            return check_transversal_level_set(f, rho, level, spec(ctx), t, "", ctx.execution);
        });
    } else {
        semantic(kind_entry, fmt::format("unknown check kind '{}'", kind));
    }
    k.reject_unknown();
    cfg.checks.push_back(std::move(c));
}

// "origin:line:column: message", dropping the "line N: " prefix used inside.
std::string located(const std::string& origin, const ConfigError& e)
{
    std::string_view what = e.what();
    const std::string prefix = fmt::format("line {}: ", e.line());
    if (what.substr(0, prefix.size()) == prefix)
        what.remove_prefix(prefix.size());
    if (e.line() <= 0)
        return fmt::format("{}: {}", origin, what);
    return fmt::format("{}:{}:{}: {}", origin, e.line(), e.column(), what);
}

} // namespace

SystemConfig parse_config(std::string_view text, const std::string& origin)
{
    try {
        const std::vector<Section> sections = read_sections(text);
        const Section* system = nullptr;
        const Section* constants = nullptr;
        const Section* domain = nullptr;
        for (const Section& s : sections) {
            if (s.kind == "system")
                system = &s;
            else if (s.kind == "constants")
                constants = &s;
            else if (s.kind == "domain")
                domain = &s;
        }
        if (!system)
            throw ConfigSemanticError("missing [system] section", 0, 0, "system");

        Loader l;
        l.load_system(*system, constants, domain);
        for (const Section& s : sections)
            if (s.kind == "field")
                l.load_field(s);
        for (const Section& s : sections)
            if (s.kind == "form")
                l.load_form(s);
        for (const Section& s : sections)
            if (s.kind == "check")
                l.load_check(s);
        return std::move(l.cfg);
    } catch (const ConfigSyntaxError& e) {
        throw ConfigSyntaxError(located(origin, e), e.line(), e.column(), e.key());
    } catch (const ConfigValidationError& e) {
        throw ConfigValidationError(located(origin, e), e.line(), e.column(), e.key());
    } catch (const ConfigSemanticError& e) {
        throw ConfigSemanticError(located(origin, e), e.line(), e.column(), e.key());
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        // Anything the library rejects while building the system.
        throw ConfigSemanticError(origin + ": " + e.what(), 0, 0);
    }
}

SystemConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read " + path, 0, 0);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path);
}

} // namespace extenso
