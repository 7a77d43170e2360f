/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "decorr/plan_text.hpp"

#include "decorr/errors.hpp"

#include <charconv>
#include <optional>

namespace decorr {

namespace {

// ---------------------------------------------------------------- printing

std::string attr_list(const AttrSet& attrs) {
    std::string out = "(";
    bool first = true;
    for (const auto& a : attrs) {
        if (!first) out += ' ';
        out += a.str();
        first = false;
    }
    return out + ")";
}

std::string agg_list(const std::vector<Aggregate>& aggs) {
    std::string out = "(";
    for (std::size_t i = 0; i < aggs.size(); ++i) {
        if (i) out += ' ';
        out += "(" + aggs[i].output.str() + " " + kind_name(aggs[i].fn.kind);
        if (aggs[i].fn.input) out += " " + aggs[i].fn.input->str();
        out += ")";
    }
    return out + ")";
}

void print_node(const Plan& p, int indent, std::string& out) {
    out.append(static_cast<std::size_t>(indent), ' ');
    out += "(";
    out += kind_name(p->kind);
    switch (p->kind) {
        case PlanKind::Scan: out += " " + p->table; break;
        case PlanKind::Select: out += " " + print_expr(p->expr); break;
        case PlanKind::Map: out += " " + p->target.str() + " " + print_expr(p->expr); break;
        case PlanKind::ProjectDistinct:
        case PlanKind::Project:
        case PlanKind::NullPad: out += " " + attr_list(p->attrs); break;
        case PlanKind::Rename: out += " " + p->target.str() + " " + p->source.str(); break;
        case PlanKind::GroupBy: out += " " + attr_list(p->attrs) + " " + agg_list(p->aggs); break;
        default:
            if (has_predicate(p->kind)) out += " " + print_expr(p->expr);
            break;
    }
    for (const auto& c : p->children) {
        out += "\n";
        print_node(c, indent + 2, out);
    }
    out += ")";
}

// ---------------------------------------------------------------- reading

struct Sx {
    enum Kind { Atom, String, List, Braces } kind;
    std::string text;
    std::vector<Sx> items;
    std::size_t line = 1;
    std::size_t column = 1;
};

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    /// All top-level items of the text.
    std::vector<Sx> read_all() {
        std::vector<Sx> out;
        while (true) {
            skip_space();
            if (pos_ >= text_.size()) return out;
            out.push_back(read());
        }
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, column_); }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                advance();
            } else {
                return;
            }
        }
    }

    static bool is_delimiter(char c) {
        return c == '(' || c == ')' || c == '{' || c == '}' || c == '"' || c == ';' || c == ' ' || c == '\t' ||
               c == '\n' || c == '\r';
    }

    Sx read() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        Sx sx;
        sx.line = line_;
        sx.column = column_;
        char c = text_[pos_];
        if (c == '(' || c == '{') {
            const char close = c == '(' ? ')' : '}';
            sx.kind = c == '(' ? Sx::List : Sx::Braces;
            advance();
            while (true) {
                skip_space();
                if (pos_ >= text_.size()) fail(std::string("unexpected end of input, expected '") + close + "'");
                if (text_[pos_] == close) {
                    advance();
                    return sx;
                }
                if (text_[pos_] == ')' || text_[pos_] == '}')
                    fail(std::string("unexpected '") + text_[pos_] + "', expected '" + close + "'");
                sx.items.push_back(read());
            }
        }
        if (c == ')' || c == '}') fail(std::string("unexpected '") + c + "'");
        if (c == '"') {
            sx.kind = Sx::String;
            advance();
            while (true) {
                if (pos_ >= text_.size()) fail("unterminated string");
                char ch = text_[pos_];
                if (ch == '"') {
                    advance();
                    return sx;
                }
                if (ch == '\\') {
                    advance();
                    if (pos_ >= text_.size()) fail("unterminated string");
                    ch = text_[pos_];
                }
                sx.text += ch;
                advance();
            }
        }
        sx.kind = Sx::Atom;
        while (pos_ < text_.size() && !is_delimiter(text_[pos_])) {
            sx.text += text_[pos_];
            advance();
        }
        return sx;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

[[noreturn]] void fail_at(const Sx& sx, const std::string& msg) { throw ParseError(msg, sx.line, sx.column); }

std::string describe(const Sx& sx) {
    switch (sx.kind) {
        case Sx::Atom: return "'" + sx.text + "'";
        case Sx::String: return "string";
        case Sx::List: return "list";
        case Sx::Braces: return "'{'";
    }
    return "?";
}

const Sx& expect_list(const Sx& sx, const char* what) {
    if (sx.kind != Sx::List) fail_at(sx, std::string("expected ") + what + ", got " + describe(sx));
    return sx;
}

const std::string& expect_atom(const Sx& sx, const char* what) {
    if (sx.kind != Sx::Atom) fail_at(sx, std::string("expected ") + what + ", got " + describe(sx));
    return sx.text;
}

std::optional<std::int64_t> parse_int(const std::string& s) {
    std::int64_t v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
    return v;
}

/// A literal atom/string, or nullopt when the atom is an identifier.
std::optional<Value> literal_of(const Sx& sx) {
    if (sx.kind == Sx::String) return Value(sx.text);
    if (sx.kind != Sx::Atom) return std::nullopt;
    if (sx.text == "NULL") return Value::null();
    if (sx.text == "true") return Value(true);
    if (sx.text == "false") return Value(false);
    if (auto v = parse_int(sx.text)) return Value(*v);
    if (!sx.text.empty() && (std::isdigit(static_cast<unsigned char>(sx.text[0])) ||
                             (sx.text[0] == '-' && sx.text.size() > 1)))
        fail_at(sx, "malformed number '" + sx.text + "'");
    return std::nullopt;
}

std::string base_of(const std::string& token) {
    auto hash = token.find('#');
    return hash == std::string::npos || hash == 0 ? token : token.substr(0, hash);
}

Relation relation_from(const Sx& header, const Sx& body) {
    expect_list(header, "column list");
    if (body.kind != Sx::Braces) fail_at(body, "expected '{' with rows, got " + describe(body));
    std::vector<Attribute> cols;
    std::set<std::string> seen;
    for (const auto& c : header.items) {
        const std::string& tok = expect_atom(c, "column name");
        if (literal_of(c)) fail_at(c, "expected column name, got literal " + tok);
        if (!seen.insert(tok).second) fail_at(c, "duplicate column " + tok);
        cols.push_back(fresh_attribute(base_of(tok)));
    }
    Relation rel(to_set(cols));
    for (std::size_t i = 0; i < body.items.size(); ++i) {
        const Sx& row_sx = body.items[i];
        expect_list(row_sx, "row");
        if (row_sx.items.size() != cols.size())
            fail_at(row_sx, "row has " + std::to_string(row_sx.items.size()) + " values, schema has " +
                                std::to_string(cols.size()));
        Relation::Row row;
        for (const auto& v : row_sx.items) {
            auto lit = literal_of(v);
            if (!lit) fail_at(v, "expected a value, got " + describe(v));
            row.push_back(*lit);
        }
        std::uint64_t n = 1;
        if (i + 1 < body.items.size() && body.items[i + 1].kind == Sx::Atom && !body.items[i + 1].text.empty() &&
            body.items[i + 1].text[0] == 'x') {
            const Sx& m = body.items[++i];
            auto v = parse_int(m.text.substr(1));
            if (!v) fail_at(m, "malformed multiplicity " + m.text);
            if (*v <= 0) fail_at(m, "multiplicity must be positive, got " + m.text);
            n = static_cast<std::uint64_t>(*v);
        }
        rel.add_row(std::move(row), n);
    }
    return rel;
}

/// Token ↔ attribute table for one text.
class Names {
public:
    void seed(const std::string& token, const Attribute& a) {
        if (auto it = exact_.find(token); it != exact_.end() && it->second != a) {
            exact_.erase(it);
            ambiguous_.insert(token);
        } else if (!ambiguous_.contains(token)) {
            exact_.emplace(token, a);
        }
        exact_.emplace(a.str(), a);
        auto [it, inserted] = by_base_.emplace(a.base(), a);
        if (!inserted && it->second && *it->second != a) it->second.reset();
    }

    std::optional<Attribute> lookup(const std::string& token) const {
        if (auto it = exact_.find(token); it != exact_.end()) return it->second;
        if (token.find('#') == std::string::npos && !ambiguous_.contains(token))
            if (auto it = by_base_.find(token); it != by_base_.end()) return it->second;
        return std::nullopt;
    }

    Attribute reference(const Sx& sx) const {
        const std::string& tok = expect_atom(sx, "attribute");
        if (auto a = lookup(tok)) return *a;
        if (token_is_ambiguous(tok)) fail_at(sx, "ambiguous attribute " + tok);
        fail_at(sx, "unknown attribute " + tok);
    }

    Attribute define(const Sx& sx) {
        const std::string& tok = expect_atom(sx, "attribute");
        if (literal_of(sx)) fail_at(sx, "expected attribute, got literal " + tok);
        if (auto a = lookup(tok)) return *a;
        if (token_is_ambiguous(tok)) fail_at(sx, "ambiguous attribute " + tok);
        Attribute a = fresh_attribute(base_of(tok));
        exact_.emplace(tok, a);
        return a;
    }

private:
    bool token_is_ambiguous(const std::string& tok) const {
        if (ambiguous_.contains(tok)) return true;
        auto it = by_base_.find(tok);
        return it != by_base_.end() && !it->second;
    }

    std::map<std::string, Attribute> exact_;
    std::map<std::string, std::optional<Attribute>> by_base_;
    std::set<std::string> ambiguous_;
};

const std::map<std::string, ExprKind>& expr_ops() {
    static const std::map<std::string, ExprKind> ops = [] {
        std::map<std::string, ExprKind> m;
        for (ExprKind k : {ExprKind::Add, ExprKind::Sub, ExprKind::Mul, ExprKind::Eq, ExprKind::Ne, ExprKind::Lt,
                           ExprKind::Le, ExprKind::Gt, ExprKind::Ge, ExprKind::NullSafeEq, ExprKind::And,
                           ExprKind::Or, ExprKind::Not, ExprKind::IsNull})
            m.emplace(kind_name(k), k);
        return m;
    }();
    return ops;
}

const std::map<std::string, PlanKind>& plan_ops() {
    static const std::map<std::string, PlanKind> ops = [] {
        std::map<std::string, PlanKind> m;
        for (std::size_t i = 0; i < kPlanKindCount; ++i) m.emplace(kind_name(static_cast<PlanKind>(i)), static_cast<PlanKind>(i));
        return m;
    }();
    return ops;
}

const std::map<std::string, AggKind>& agg_ops() {
    static const std::map<std::string, AggKind> ops = [] {
        std::map<std::string, AggKind> m;
        for (AggKind k : {AggKind::CountStar, AggKind::Count, AggKind::Sum, AggKind::Min, AggKind::Max})
            m.emplace(kind_name(k), k);
        return m;
    }();
    return ops;
}

class PlanBuilder {
public:
    PlanBuilder(const Catalog& cat, Names& names) : cat_(cat), names_(names) {}

    ScalarExpr expr(const Sx& sx) {
        if (sx.kind != Sx::List) {
            if (auto lit = literal_of(sx)) return expr::lit(*lit);
            return expr::col(names_.reference(sx));
        }
        if (sx.items.empty()) fail_at(sx, "empty expression");
        const std::string& op = expect_atom(sx.items[0], "operator");
        auto it = expr_ops().find(op);
        if (it == expr_ops().end()) fail_at(sx.items[0], "unknown operator " + op);
        std::vector<ScalarExpr> args;
        for (std::size_t i = 1; i < sx.items.size(); ++i) args.push_back(expr(sx.items[i]));
        try {
            return expr::make(it->second, std::move(args));
        } catch (const std::exception& e) {
            fail_at(sx, e.what());
        }
    }

    Plan plan(const Sx& sx) {
        expect_list(sx, "plan node");
        if (sx.items.empty()) fail_at(sx, "empty plan node");
        const std::string& op = expect_atom(sx.items[0], "operator");
        auto it = plan_ops().find(op);
        if (it == plan_ops().end()) fail_at(sx.items[0], "unknown operator " + op);
        const PlanKind kind = it->second;
        const auto& a = sx.items;
        auto arity = [&](std::size_t n) {
            if (a.size() != n + 1)
                fail_at(sx, op + " takes " + std::to_string(n) + " arguments, got " + std::to_string(a.size() - 1));
        };
        switch (kind) {
            case PlanKind::Scan: {
                arity(1);
                const std::string& table = expect_atom(a[1], "table name");
                auto t = cat_.find(table);
                if (t == cat_.end()) fail_at(a[1], "unknown table " + table);
                return plan::scan(table, t->second.schema());
            }
            case PlanKind::Select: {
                arity(2);
                Plan c = plan(a[2]);
                return plan::select(expr(a[1]), c);
            }
            case PlanKind::Map: {
                arity(3);
                Plan c = plan(a[3]);
                Attribute target = names_.define(a[1]);
                return plan::map(target, expr(a[2]), c);
            }
            case PlanKind::Project:
            case PlanKind::ProjectDistinct: {
                arity(2);
                Plan c = plan(a[2]);
                AttrSet attrs = references(a[1]);
                return kind == PlanKind::Project ? plan::project(attrs, c) : plan::project_distinct(attrs, c);
            }
            case PlanKind::Rename: {
                arity(3);
                Plan c = plan(a[3]);
                Attribute from = names_.reference(a[2]);
                return plan::rename(names_.define(a[1]), from, c);
            }
            case PlanKind::NullPad: {
                arity(2);
                Plan c = plan(a[2]);
                AttrSet attrs;
                for (const auto& x : expect_list(a[1], "attribute list").items) attrs.insert(names_.define(x));
                return plan::null_pad(attrs, c);
            }
            case PlanKind::GroupBy: {
                arity(3);
                Plan c = plan(a[3]);
                AttrSet keys = references(a[1]);
                std::vector<Aggregate> aggs;
                for (const auto& x : expect_list(a[2], "aggregate list").items) {
                    expect_list(x, "aggregate");
                    if (x.items.size() < 2 || x.items.size() > 3) fail_at(x, "aggregate must be (name fn [input])");
                    const std::string& fn = expect_atom(x.items[1], "aggregate function");
                    auto f = agg_ops().find(fn);
                    if (f == agg_ops().end()) fail_at(x.items[1], "unknown aggregate " + fn);
                    Aggregate agg;
                    agg.fn.kind = f->second;
                    if (x.items.size() == 3) agg.fn.input = names_.reference(x.items[2]);
                    agg.output = names_.define(x.items[0]);
                    aggs.push_back(std::move(agg));
                }
                return plan::group_by(keys, std::move(aggs), c);
            }
            case PlanKind::Union:
            case PlanKind::Intersect:
            case PlanKind::Except:
            case PlanKind::Cross: {
                arity(2);
                Plan l = plan(a[1]);
                Plan r = plan(a[2]);
                switch (kind) {
                    case PlanKind::Union: return plan::set_union(l, r);
                    case PlanKind::Intersect: return plan::intersect(l, r);
                    case PlanKind::Except: return plan::except(l, r);
                    default: return plan::cross(l, r);
                }
            }
            default: {
                arity(3);
                Plan l = plan(a[2]);
                Plan r = plan(a[3]);
                ScalarExpr p = expr(a[1]);
                switch (kind) {
                    case PlanKind::Join: return plan::join(p, l, r);
                    case PlanKind::DependentJoin: return plan::dependent_join(p, l, r);
                    case PlanKind::SemiJoin: return plan::semi_join(p, l, r);
                    case PlanKind::AntiJoin: return plan::anti_join(p, l, r);
                    default: return plan::outer_join(p, l, r);
                }
            }
        }
    }

private:
    AttrSet references(const Sx& sx) {
        AttrSet out;
        for (const auto& x : expect_list(sx, "attribute list").items) out.insert(names_.reference(x));
        return out;
    }

    const Catalog& cat_;
    Names& names_;
};

Plan single_plan(const std::vector<Sx>& items, std::size_t from, const Catalog& cat, Names& names) {
    if (from >= items.size()) throw ParseError("expected a plan", 1, 1);
    if (from + 1 < items.size()) fail_at(items[from + 1], "unexpected text after the plan");
    PlanBuilder b(cat, names);
    return b.plan(items[from]);
}

} // namespace

std::string print_expr(const ScalarExpr& e) {
    if (e->kind == ExprKind::Attr) return e->attr.str();
    if (e->kind == ExprKind::Literal) return e->literal.to_string();
    std::string out = "(";
    out += kind_name(e->kind);
    for (const auto& a : e->args) out += " " + print_expr(a);
    return out + ")";
}

std::string print_plan(const Plan& p) {
    std::string out;
    print_node(p, 0, out);
    return out;
}

std::string print_relation(const Relation& r) {
    std::string out = "rel (";
    for (std::size_t i = 0; i < r.columns().size(); ++i) {
        if (i) out += ' ';
        out += r.columns()[i].str();
    }
    out += ") {";
    for (const auto& [row, n] : r.rows()) {
        out += " (";
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ' ';
            out += row[i].to_string();
        }
        out += ")";
        if (n > 1) out += " x" + std::to_string(n);
    }
    return out + " }";
}

std::string print_script(const PlanScript& script) {
    std::string out;
    for (const auto& [name, rel] : script.catalog) out += "table " + name + " " + print_relation(rel) + "\n";
    out += "plan\n";
    if (script.plan) out += print_plan(script.plan) + "\n";
    return out;
}

Plan parse_plan(std::string_view text, const Catalog& cat) {
    Names names;
    for (const auto& [name, rel] : cat)
        for (const auto& a : rel.columns()) names.seed(a.str(), a);
    return single_plan(Reader(text).read_all(), 0, cat, names);
}

Relation parse_relation(std::string_view text) {
    auto items = Reader(text).read_all();
    if (items.empty()) throw ParseError("expected a relation", 1, 1);
    if (expect_atom(items[0], "'rel'") != "rel") fail_at(items[0], "expected 'rel'");
    if (items.size() < 3) fail_at(items.back(), "incomplete relation");
    if (items.size() > 3) fail_at(items[3], "unexpected text after the relation");
    return relation_from(items[1], items[2]);
}

PlanScript parse_script(std::string_view text) {
    auto items = Reader(text).read_all();
    PlanScript script;
    Names names;
    std::size_t i = 0;
    while (i < items.size()) {
        const std::string& kw = expect_atom(items[i], "'table' or 'plan'");
        if (kw == "plan") break;
        if (kw != "table") fail_at(items[i], "expected 'table' or 'plan', got '" + kw + "'");
        if (i + 4 >= items.size()) fail_at(items[i], "incomplete table definition");
        const std::string& name = expect_atom(items[i + 1], "table name");
        if (expect_atom(items[i + 2], "'rel'") != "rel") fail_at(items[i + 2], "expected 'rel'");
        if (script.catalog.contains(name)) fail_at(items[i + 1], "duplicate table " + name);
        Relation rel = relation_from(items[i + 3], items[i + 4]);
        const auto& header = items[i + 3].items;
        for (std::size_t c = 0; c < header.size(); ++c) {
            names.seed(header[c].text, rel.columns()[c]);
        }
        script.catalog.emplace(name, std::move(rel));
        i += 5;
    }
    if (i >= items.size()) throw ParseError("missing 'plan' section", 1, 1);
    script.plan = single_plan(items, i + 1, script.catalog, names);
    return script;
}

} // namespace decorr
