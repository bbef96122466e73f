#include "plcsynth/spec.hpp"

#include <expat.h>

#include <algorithm>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "plcsynth/lang.hpp"

namespace plcsynth {

std::string_view to_string(Mode m) {
  switch (m) {
  case Mode::Generate: return "generate";
  case Mode::Verify: return "verify";
  case Mode::Repair: return "repair";
  case Mode::Simplify: return "simplify";
  case Mode::Extend: return "extend";
  case Mode::Translate: return "translate";
  }
  return "generate";
}

std::optional<Mode> parse_mode(std::string_view text) {
  for (Mode m : {Mode::Generate, Mode::Verify, Mode::Repair, Mode::Simplify, Mode::Extend,
                 Mode::Translate})
    if (to_string(m) == text)
      return m;
  return std::nullopt;
}

namespace {

std::string quoted(const Identifier &id) { return "'" + id.str() + "'"; }

void require_direction(const BlockInterface &iface, const Identifier &name, Direction dir,
                       std::string_view role) {
  const VarDecl *d = iface.find(name);
  if (!d)
    throw TypeError("undeclared variable " + quoted(name) + " in " + std::string(role));
  if (d->direction != dir)
    throw TypeError(quoted(name) + " is not an " + std::string(to_string(dir)) + " (used in " +
                    std::string(role) + ")");
}

struct Validator {
  const BlockInterface &iface;

  void operator()(const TruthTableRow &row) const {
    for (const auto &[name, v] : row.inputs)
      require_direction(iface, name, Direction::Input, "truth-table row");
    bool any_output = false;
    for (const auto &[name, v] : row.outputs) {
      require_direction(iface, name, Direction::Output, "truth-table row");
      any_output = any_output || v != TriValue::DontCare;
    }
    if (!any_output)
      throw TypeError("truth-table row leaves every output unspecified");
  }

  void operator()(const CauseEffectColumn &col) const {
    require_direction(iface, col.output, Direction::Output, "cause-effect column");
    bool any = false;
    for (const auto &[name, mark] : col.cells) {
      require_direction(iface, name, Direction::Input, "cause-effect column");
      any = any || mark != CauseMark::Blank;
    }
    if (!any)
      throw TypeError("cause-effect column for " + quoted(col.output) + " has no marked cause");
  }

  void operator()(const Assertion &a) const {
    for (const auto &v : a.expr.vars()) {
      const VarDecl *d = iface.find(v);
      if (!d)
        throw TypeError("undeclared variable " + quoted(v) + " in assertion");
      if (d->direction == Direction::Temp)
        throw TypeError("assertion reads temp " + quoted(v));
    }
  }
};

Expr literal(const Identifier &name, bool positive) {
  Expr v = Expr::var(name);
  return positive ? v : Expr::negate(std::move(v));
}

} // namespace

void validate(const ConstraintList &list) {
  for (const auto &d : list.interface.decls())
    if (d.direction == Direction::Temp)
      throw TypeError("constraint-list interface declares temp " + quoted(d.name));
  Validator v{list.interface};
  for (const auto &c : list.constraints)
    std::visit(v, c);
}

bool SpecFormula::empty() const {
  if (!assertions.empty())
    return false;
  return std::all_of(obligations.begin(), obligations.end(),
                     [](const auto &kv) { return kv.second.empty(); });
}

SpecFormula compile_spec(const ConstraintList &list) {
  validate(list);
  SpecFormula spec;
  spec.interface = list.interface;
  for (std::size_t i = 0; i < list.constraints.size(); ++i) {
    const auto &c = list.constraints[i];
    std::string number = "constraint " + std::to_string(i + 1);
    if (const auto *row = std::get_if<TruthTableRow>(&c)) {
      std::vector<Expr> lits;
      for (const auto &[name, v] : row->inputs)
        if (v != TriValue::DontCare)
          lits.push_back(literal(name, v == TriValue::True));
      Expr guard = conj_all(lits);
      for (const auto &[name, v] : row->outputs)
        if (v != TriValue::DontCare)
          spec.obligations[name].push_back(
              {guard, v == TriValue::True, i, number + " (truth-table row)"});
    } else if (const auto *col = std::get_if<CauseEffectColumn>(&c)) {
      std::vector<Expr> lits;
      for (const auto &[name, mark] : col->cells)
        if (mark != CauseMark::Blank)
          lits.push_back(literal(name, mark == CauseMark::Mark));
      Expr cond = col->combinator == Combinator::Any ? disj_all(lits) : conj_all(lits);
      std::string origin = number + " (cause-effect " + col->output.str() + ")";
      spec.obligations[col->output].push_back({cond, true, i, origin});
      spec.obligations[col->output].push_back({Expr::negate(cond), false, i, origin});
    } else {
      const auto &a = std::get<Assertion>(c);
      spec.assertions.push_back(
          {a.expr, i, number + " (assertion " + format_st_expression(a.expr) + ")"});
    }
  }
  return spec;
}

std::vector<Obligation> obligations_of(const SpecFormula &spec) {
  std::vector<Obligation> out;
  for (const auto &o : spec.interface.outputs()) {
    auto it = spec.obligations.find(o);
    if (it == spec.obligations.end())
      continue;
    for (const auto &imp : it->second) {
      Expr lit = literal(o, imp.value);
      Expr f = imp.guard.kind() == ExprKind::Const && imp.guard.value()
                   ? lit
                   : Expr::disj(Expr::negate(imp.guard), lit);
      out.push_back({std::move(f),
                     imp.origin + " requires " + o.str() + "=" + (imp.value ? "1" : "0")});
    }
  }
  for (const auto &a : spec.assertions)
    out.push_back({a.expr, a.origin});
  return out;
}

// ---------------------------------------------------------------------------
// Consistency

ConsistencyReport check_consistency(const ConstraintList &list) {
  validate(list);
  ConsistencyReport report;
  auto cell = [](const std::map<Identifier, TriValue> &m, const Identifier &k) {
    auto it = m.find(k);
    return it == m.end() ? TriValue::DontCare : it->second;
  };
  const auto inputs = list.interface.inputs();
  const auto outputs = list.interface.outputs();
  for (std::size_t i = 0; i < list.constraints.size(); ++i) {
    const auto *a = std::get_if<TruthTableRow>(&list.constraints[i]);
    if (!a)
      continue;
    for (std::size_t j = i + 1; j < list.constraints.size(); ++j) {
      const auto *b = std::get_if<TruthTableRow>(&list.constraints[j]);
      if (!b)
        continue;
      Assignment witness;
      bool unify = true;
      for (const auto &in : inputs) {
        TriValue va = cell(a->inputs, in), vb = cell(b->inputs, in);
        if (va != TriValue::DontCare && vb != TriValue::DontCare && va != vb) {
          unify = false;
          break;
        }
        TriValue v = va != TriValue::DontCare ? va : vb;
        witness.set(in, v == TriValue::True);
      }
      if (!unify)
        continue;
      for (const auto &out : outputs) {
        TriValue va = cell(a->outputs, out), vb = cell(b->outputs, out);
        if (va != TriValue::DontCare && vb != TriValue::DontCare && va != vb)
          report.conflicts.push_back({i, j, out, witness});
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Templates

ConstraintList instantiate_template(const ConstraintList &tmpl,
                                    const std::map<Identifier, Identifier> &renaming) {
  for (const auto &[from, to] : renaming)
    if (!tmpl.interface.contains(from))
      throw MissingRenameTarget("template has no variable " + quoted(from) + " to rename");

  std::map<Identifier, Identifier> full;
  std::set<Identifier> targets;
  for (const auto &d : tmpl.interface.decls()) {
    auto it = renaming.find(d.name);
    Identifier to = it == renaming.end() ? d.name : it->second;
    if (!targets.insert(to).second)
      throw RenameCollision("renaming maps two variables to " + quoted(to));
    full.emplace(d.name, to);
  }

  auto ren = [&](const Identifier &n) { return full.at(n); };
  ConstraintList out{tmpl.block_name, tmpl.mode, {}, {}};
  for (const auto &d : tmpl.interface.decls())
    out.interface.add({ren(d.name), d.direction, d.dtype});

  for (const auto &c : tmpl.constraints) {
    if (const auto *row = std::get_if<TruthTableRow>(&c)) {
      TruthTableRow r;
      for (const auto &[k, v] : row->inputs)
        r.inputs.emplace(ren(k), v);
      for (const auto &[k, v] : row->outputs)
        r.outputs.emplace(ren(k), v);
      out.constraints.emplace_back(std::move(r));
    } else if (const auto *col = std::get_if<CauseEffectColumn>(&c)) {
      CauseEffectColumn r{ren(col->output), col->combinator, {}};
      for (const auto &[k, v] : col->cells)
        r.cells.emplace(ren(k), v);
      out.constraints.emplace_back(std::move(r));
    } else {
      out.constraints.emplace_back(Assertion{rename(std::get<Assertion>(c).expr, full)});
    }
  }
  validate(out);
  return out;
}

// ---------------------------------------------------------------------------
// XML

namespace {

struct XmlNode {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attrs;
  std::vector<std::unique_ptr<XmlNode>> children;
  std::size_t line = 0;

  const std::string *attr(std::string_view key) const {
    for (const auto &[k, v] : attrs)
      if (k == key)
        return &v;
    return nullptr;
  }
};

struct XmlBuilder {
  std::unique_ptr<XmlNode> root;
  std::vector<XmlNode *> stack;
  XML_Parser parser = nullptr;
  std::optional<SchemaError> error;

  static void on_start(void *ud, const XML_Char *name, const XML_Char **atts) {
    auto *self = static_cast<XmlBuilder *>(ud);
    auto node = std::make_unique<XmlNode>();
    node->name = name;
    node->line = XML_GetCurrentLineNumber(self->parser);
    for (std::size_t i = 0; atts[i]; i += 2)
      node->attrs.emplace_back(atts[i], atts[i + 1]);
    XmlNode *raw = node.get();
    if (self->stack.empty())
      self->root = std::move(node);
    else
      self->stack.back()->children.push_back(std::move(node));
    self->stack.push_back(raw);
  }

  static void on_end(void *ud, const XML_Char *) {
    static_cast<XmlBuilder *>(ud)->stack.pop_back();
  }

  static void on_text(void *ud, const XML_Char *s, int len) {
    auto *self = static_cast<XmlBuilder *>(ud);
    std::string_view text(s, static_cast<std::size_t>(len));
    if (!self->error && text.find_first_not_of(" \t\r\n") != std::string_view::npos)
      self->error.emplace(XML_GetCurrentLineNumber(self->parser), "unexpected text content");
  }
};

std::unique_ptr<XmlNode> parse_xml(const std::string &text) {
  XmlBuilder b;
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate(nullptr), &XML_ParserFree);
  if (!parser)
    throw InternalError("cannot create XML parser");
  b.parser = parser.get();
  XML_SetUserData(parser.get(), &b);
  XML_SetElementHandler(parser.get(), &XmlBuilder::on_start, &XmlBuilder::on_end);
  XML_SetCharacterDataHandler(parser.get(), &XmlBuilder::on_text);
  if (XML_Parse(parser.get(), text.data(), static_cast<int>(text.size()), 1) == XML_STATUS_ERROR)
    throw SchemaError(XML_GetCurrentLineNumber(parser.get()),
                      std::string("malformed XML: ") +
                          XML_ErrorString(XML_GetErrorCode(parser.get())));
  if (b.error)
    throw *b.error;
  if (!b.root)
    throw SchemaError(1, "empty document");
  return std::move(b.root);
}

void allow_attrs(const XmlNode &n, std::initializer_list<std::string_view> allowed) {
  for (const auto &[k, v] : n.attrs)
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw SchemaError(n.line, "unknown attribute '" + k + "' on <" + n.name + ">");
}

const std::string &need_attr(const XmlNode &n, std::string_view key) {
  const std::string *v = n.attr(key);
  if (!v)
    throw SchemaError(n.line, "<" + n.name + "> requires attribute '" + std::string(key) + "'");
  return *v;
}

void no_children(const XmlNode &n) {
  if (!n.children.empty())
    throw SchemaError(n.children.front()->line,
                      "unexpected element <" + n.children.front()->name + "> inside <" +
                          n.name + ">");
}

Identifier need_identifier(const XmlNode &n, const std::string &text) {
  if (!Identifier::is_valid(text))
    throw SchemaError(n.line, "invalid identifier '" + text + "'");
  return Identifier(text);
}

Identifier declared(const XmlNode &n, const BlockInterface &iface, const std::string &text,
                    Direction dir) {
  Identifier id = need_identifier(n, text);
  const VarDecl *d = iface.find(id);
  if (!d)
    throw SchemaError(n.line, "undeclared variable '" + text + "'");
  if (d->direction != dir)
    throw SchemaError(n.line, "'" + text + "' is not an " + std::string(to_string(dir)));
  return id;
}

std::map<Identifier, TriValue> parse_cells(const XmlNode &n, const BlockInterface &iface,
                                           const std::string &text, Direction dir) {
  std::map<Identifier, TriValue> cells;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t");
      auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    item = trim(item);
    if (item.empty())
      continue;
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw SchemaError(n.line, "cell '" + item + "' is not of the form name=0|1|-");
    std::string name = trim(item.substr(0, eq)), value = trim(item.substr(eq + 1));
    Identifier id = declared(n, iface, name, dir);
    TriValue tv;
    if (value == "1")
      tv = TriValue::True;
    else if (value == "0")
      tv = TriValue::False;
    else if (value == "-")
      tv = TriValue::DontCare;
    else
      throw SchemaError(n.line, "cell value '" + value + "' for '" + name + "' is not 0, 1 or -");
    if (!cells.emplace(id, tv).second)
      throw SchemaError(n.line, "duplicate cell for '" + name + "'");
  }
  return cells;
}

BlockInterface parse_interface(const XmlNode &n) {
  allow_attrs(n, {});
  BlockInterface iface;
  for (const auto &c : n.children) {
    if (c->name != "var")
      throw SchemaError(c->line, "unexpected element <" + c->name + "> inside <interface>");
    allow_attrs(*c, {"name", "dir", "type"});
    no_children(*c);
    Identifier name = need_identifier(*c, need_attr(*c, "name"));
    const std::string &dir = need_attr(*c, "dir");
    Direction d;
    if (dir == "in")
      d = Direction::Input;
    else if (dir == "out")
      d = Direction::Output;
    else if (dir == "state")
      d = Direction::State;
    else
      throw SchemaError(c->line, "dir must be in, out or state, not '" + dir + "'");
    if (const auto *type = c->attr("type"); type && *type != "BOOL")
      throw SchemaError(c->line, "unsupported type '" + *type + "'");
    if (iface.contains(name))
      throw SchemaError(c->line, "duplicate declaration of '" + name.str() + "'");
    iface.add({name, d});
  }
  return iface;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    case '\'': out += "&apos;"; break;
    default: out += c;
    }
  }
  return out;
}

std::string format_cells(const std::map<Identifier, TriValue> &cells) {
  std::string out;
  for (const auto &[k, v] : cells) {
    if (!out.empty())
      out += ';';
    out += k.str() + '=' + (v == TriValue::True ? "1" : v == TriValue::False ? "0" : "-");
  }
  return out;
}

} // namespace

ConstraintList parse_constraints_xml(const std::string &xml) {
  auto root = parse_xml(xml);
  if (root->name != "constraintList")
    throw SchemaError(root->line, "root element must be <constraintList>, not <" + root->name + ">");
  allow_attrs(*root, {"block", "mode"});
  Identifier block = need_identifier(*root, need_attr(*root, "block"));
  const std::string &mode_text = need_attr(*root, "mode");
  auto mode = parse_mode(mode_text);
  if (!mode)
    throw SchemaError(root->line, "unknown mode '" + mode_text + "'");

  ConstraintList list{block, *mode, {}, {}};
  bool have_interface = false;
  for (const auto &c : root->children) {
    const XmlNode &n = *c;
    if (n.name == "interface") {
      if (have_interface)
        throw SchemaError(n.line, "duplicate <interface>");
      if (!list.constraints.empty())
        throw SchemaError(n.line, "<interface> must precede all constraints");
      list.interface = parse_interface(n);
      have_interface = true;
      continue;
    }
    if (!have_interface)
      throw SchemaError(n.line, "<" + n.name + "> before <interface>");
    if (n.name == "truthTable") {
      allow_attrs(n, {});
      for (const auto &r : n.children) {
        if (r->name != "row")
          throw SchemaError(r->line, "unexpected element <" + r->name + "> inside <truthTable>");
        allow_attrs(*r, {"in", "out"});
        no_children(*r);
        TruthTableRow row;
        if (const auto *in = r->attr("in"))
          row.inputs = parse_cells(*r, list.interface, *in, Direction::Input);
        row.outputs = parse_cells(*r, list.interface, need_attr(*r, "out"), Direction::Output);
        if (std::all_of(row.outputs.begin(), row.outputs.end(),
                        [](const auto &kv) { return kv.second == TriValue::DontCare; }))
          throw SchemaError(r->line, "row leaves every output unspecified");
        list.constraints.emplace_back(std::move(row));
      }
    } else if (n.name == "causeEffect") {
      allow_attrs(n, {"output", "combinator"});
      CauseEffectColumn col{declared(n, list.interface, need_attr(n, "output"), Direction::Output),
                            Combinator::Any, {}};
      const std::string &comb = need_attr(n, "combinator");
      if (comb == "any")
        col.combinator = Combinator::Any;
      else if (comb == "all")
        col.combinator = Combinator::All;
      else
        throw SchemaError(n.line, "combinator must be any or all, not '" + comb + "'");
      for (const auto &cz : n.children) {
        if (cz->name != "cause")
          throw SchemaError(cz->line, "unexpected element <" + cz->name + "> inside <causeEffect>");
        allow_attrs(*cz, {"input", "mark"});
        no_children(*cz);
        Identifier in = declared(*cz, list.interface, need_attr(*cz, "input"), Direction::Input);
        const std::string &mark = need_attr(*cz, "mark");
        CauseMark m;
        if (mark == "x")
          m = CauseMark::Mark;
        else if (mark == "n")
          m = CauseMark::NegMark;
        else
          throw SchemaError(cz->line, "mark must be x or n, not '" + mark + "'");
        if (!col.cells.emplace(in, m).second)
          throw SchemaError(cz->line, "duplicate cause '" + in.str() + "'");
      }
      if (col.cells.empty())
        throw SchemaError(n.line, "<causeEffect> needs at least one <cause>");
      list.constraints.emplace_back(std::move(col));
    } else if (n.name == "assertion") {
      allow_attrs(n, {"expr"});
      no_children(n);
      try {
        Expr e = parse_st_expression(need_attr(n, "expr"), list.interface);
        list.constraints.emplace_back(Assertion{std::move(e)});
      } catch (const ParseError &e) {
        throw SchemaError(n.line, "assertion: " + std::string(e.what()));
      } catch (const TypeError &e) {
        throw SchemaError(n.line, "assertion: " + std::string(e.what()));
      }
    } else {
      throw SchemaError(n.line, "unknown element <" + n.name + ">");
    }
  }
  if (!have_interface)
    throw SchemaError(root->line, "missing <interface>");
  try {
    validate(list);
  } catch (const TypeError &e) {
    throw SchemaError(root->line, e.what());
  }
  return list;
}

std::string format_constraints_xml(const ConstraintList &list) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<constraintList block=\"" << escape(list.block_name.str()) << "\" mode=\""
     << to_string(list.mode) << "\">\n";
  os << "  <interface>\n";
  for (const auto &d : list.interface.decls()) {
    const char *dir = d.direction == Direction::Input    ? "in"
                      : d.direction == Direction::Output ? "out"
                                                         : "state";
    os << "    <var name=\"" << escape(d.name.str()) << "\" dir=\"" << dir
       << "\" type=\"BOOL\"/>\n";
  }
  os << "  </interface>\n";
  // Each run of consecutive rows gets its own <truthTable> so mixed lists
  // keep their order.
  bool in_table = false;
  for (const auto &c : list.constraints) {
    const auto *row = std::get_if<TruthTableRow>(&c);
    if (row && !in_table)
      os << "  <truthTable>\n";
    else if (!row && in_table)
      os << "  </truthTable>\n";
    in_table = row != nullptr;
    if (row) {
      os << "    <row";
      if (!row->inputs.empty())
        os << " in=\"" << escape(format_cells(row->inputs)) << "\"";
      os << " out=\"" << escape(format_cells(row->outputs)) << "\"/>\n";
    } else if (const auto *col = std::get_if<CauseEffectColumn>(&c)) {
      os << "  <causeEffect output=\"" << escape(col->output.str()) << "\" combinator=\""
         << (col->combinator == Combinator::Any ? "any" : "all") << "\">\n";
      for (const auto &[k, m] : col->cells)
        if (m != CauseMark::Blank)
          os << "    <cause input=\"" << escape(k.str()) << "\" mark=\""
             << (m == CauseMark::Mark ? "x" : "n") << "\"/>\n";
      os << "  </causeEffect>\n";
    } else if (const auto *a = std::get_if<Assertion>(&c)) {
      os << "  <assertion expr=\"" << escape(format_st_expression(a->expr)) << "\"/>\n";
    }
  }
  if (in_table)
    os << "  </truthTable>\n";
  os << "</constraintList>\n";
  return os.str();
}

ConstraintList load_constraints(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_constraints_xml(ss.str());
}

void save_constraints(const ConstraintList &list, const std::filesystem::path &path) {
  validate(list);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot write " + path.string());
  out << format_constraints_xml(list);
  if (!out)
    throw IoError("error writing " + path.string());
}

} // namespace plcsynth
