//! Validation against a small subset of XML Schema.
//!
//! Supported: global and local element declarations, named and anonymous
//! complex types whose content is a `sequence` of elements, attributes with
//! `use="required"`, the builtin types listed in [`Builtin`], and simple
//! type restrictions with `pattern`, `length`, `minLength`, `maxLength` and
//! `enumeration` facets. Anything else in the schema is reported as
//! unsupported instead of being silently skipped.

use std::collections::BTreeMap;

use regex::Regex;
use roxmltree::{Document, Node};
use thiserror::Error;

const XS: &str = "http://www.w3.org/2001/XMLSchema";
const XSI: &str = "http://www.w3.org/2001/XMLSchema-instance";

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("schema is not well-formed XML: {0}")]
    Xml(#[from] roxmltree::Error),
    #[error("unsupported schema construct: {0}")]
    Unsupported(String),
    #[error("invalid schema: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Slash-separated element path, e.g. `/records/record[2]/year`.
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    String,
    Integer,
    NonNegativeInteger,
    PositiveInteger,
    Boolean,
    GYear,
    Date,
    AnyUri,
}

impl Builtin {
    fn from_local(name: &str) -> Option<Self> {
        Some(match name {
            "string" | "normalizedString" | "token" => Builtin::String,
            "integer" | "int" | "long" => Builtin::Integer,
            "nonNegativeInteger" => Builtin::NonNegativeInteger,
            "positiveInteger" => Builtin::PositiveInteger,
            "boolean" => Builtin::Boolean,
            "gYear" => Builtin::GYear,
            "date" => Builtin::Date,
            "anyURI" => Builtin::AnyUri,
            _ => return None,
        })
    }

    fn check(self, v: &str) -> bool {
        let t = v.trim();
        let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
        match self {
            Builtin::String | Builtin::AnyUri => true,
            Builtin::Integer => digits(t.strip_prefix(['-', '+']).unwrap_or(t)),
            Builtin::NonNegativeInteger => digits(t.strip_prefix('+').unwrap_or(t)),
            Builtin::PositiveInteger => {
                let d = t.strip_prefix('+').unwrap_or(t);
                digits(d) && d.bytes().any(|b| b != b'0')
            }
            Builtin::Boolean => matches!(t, "true" | "false" | "1" | "0"),
            Builtin::GYear => {
                let d = t.strip_prefix('-').unwrap_or(t);
                d.len() >= 4 && digits(d)
            }
            Builtin::Date => chrono::NaiveDate::parse_from_str(t, "%Y-%m-%d").is_ok(),
        }
    }
}

#[derive(Debug, Clone)]
struct SimpleType {
    base: Builtin,
    patterns: Vec<Regex>,
    length: Option<usize>,
    min_length: Option<usize>,
    max_length: Option<usize>,
    enumeration: Vec<String>,
}

impl SimpleType {
    fn builtin(base: Builtin) -> Self {
        SimpleType { base, patterns: Vec::new(), length: None, min_length: None, max_length: None, enumeration: Vec::new() }
    }

    fn check(&self, raw: &str) -> Result<(), String> {
        let v = if self.base == Builtin::String { raw } else { raw.trim() };
        if !self.base.check(v) {
            return Err(format!("{v:?} is not a valid {:?}", self.base));
        }
        let n = v.chars().count();
        if self.length.is_some_and(|l| l != n) {
            return Err(format!("length {n} differs from required {}", self.length.unwrap_or_default()));
        }
        if self.min_length.is_some_and(|l| n < l) || self.max_length.is_some_and(|l| n > l) {
            return Err(format!("length {n} outside the allowed range"));
        }
        if let Some(p) = self.patterns.iter().find(|p| !p.is_match(v)) {
            return Err(format!("{v:?} does not match pattern {}", p.as_str()));
        }
        if !self.enumeration.is_empty() && !self.enumeration.iter().any(|e| e == v) {
            return Err(format!("{v:?} is not one of the enumerated values"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct AttributeDecl {
    name: String,
    ty: SimpleType,
    required: bool,
}

#[derive(Debug, Clone)]
struct ComplexType {
    sequence: Vec<ElementDecl>,
    attributes: Vec<AttributeDecl>,
}

#[derive(Debug, Clone)]
enum Content {
    Simple(SimpleType),
    Complex(ComplexType),
}

#[derive(Debug, Clone)]
struct ElementDecl {
    name: String,
    namespace: Option<String>,
    min: usize,
    max: Option<usize>,
    content: Content,
}

/// A compiled schema.
#[derive(Debug, Clone)]
pub struct Schema {
    roots: Vec<ElementDecl>,
}

struct Compiler<'a, 'input> {
    target_ns: Option<String>,
    qualified: bool,
    simple: BTreeMap<&'a str, Node<'a, 'input>>,
    complex: BTreeMap<&'a str, Node<'a, 'input>>,
    stack: Vec<String>,
}

fn xs_children<'a, 'input>(n: Node<'a, 'input>) -> impl Iterator<Item = Node<'a, 'input>> {
    n.children().filter(|c| c.is_element() && c.tag_name().name() != "annotation")
}

fn unsupported(n: Node) -> SchemaError {
    SchemaError::Unsupported(format!("<xs:{}> at byte {}", n.tag_name().name(), n.range().start))
}

fn parse_count(v: Option<&str>, default: usize) -> Result<Option<usize>, SchemaError> {
    match v {
        None => Ok(Some(default)),
        Some("unbounded") => Ok(None),
        Some(s) => s.trim().parse().map(Some).map_err(|_| SchemaError::Invalid(format!("bad occurrence count {s:?}"))),
    }
}

impl<'a, 'input> Compiler<'a, 'input> {
    /// Splits a QName into (namespace, local) using the node's bindings.
    fn resolve_qname(&self, at: Node, qname: &str) -> (Option<String>, String) {
        let (prefix, local) = match qname.split_once(':') {
            Some((p, l)) => (Some(p), l),
            None => (None, qname),
        };
        (at.lookup_namespace_uri(prefix).map(str::to_owned), local.to_owned())
    }

    fn simple_type_ref(&mut self, at: Node, qname: &str) -> Result<SimpleType, SchemaError> {
        let (ns, local) = self.resolve_qname(at, qname);
        if ns.as_deref() == Some(XS) {
            return Builtin::from_local(&local)
                .map(SimpleType::builtin)
                .ok_or_else(|| SchemaError::Unsupported(format!("builtin type xs:{local}")));
        }
        let node = *self.simple.get(local.as_str()).ok_or_else(|| SchemaError::Invalid(format!("unknown simple type {qname:?}")))?;
        self.simple_type(node)
    }

    fn simple_type(&mut self, n: Node) -> Result<SimpleType, SchemaError> {
        let mut kids = xs_children(n);
        let restriction = kids.next().filter(|r| r.tag_name().name() == "restriction").ok_or_else(|| unsupported(n))?;
        if kids.next().is_some() {
            return Err(unsupported(n));
        }
        let base = restriction.attribute("base").ok_or_else(|| SchemaError::Invalid("restriction without base".into()))?;
        let mut ty = self.simple_type_ref(restriction, base)?;
        for facet in xs_children(restriction) {
            let value = facet.attribute("value").ok_or_else(|| SchemaError::Invalid("facet without value".into()))?;
            let number = || value.trim().parse::<usize>().map_err(|_| SchemaError::Invalid(format!("bad facet value {value:?}")));
            match facet.tag_name().name() {
                "pattern" => ty
                    .patterns
                    .push(Regex::new(&format!("^(?:{value})$")).map_err(|e| SchemaError::Invalid(format!("pattern {value:?}: {e}")))?),
                "length" => ty.length = Some(number()?),
                "minLength" => ty.min_length = Some(number()?),
                "maxLength" => ty.max_length = Some(number()?),
                "enumeration" => ty.enumeration.push(value.to_owned()),
                _ => return Err(unsupported(facet)),
            }
        }
        Ok(ty)
    }

    fn complex_type(&mut self, n: Node<'a, 'input>) -> Result<ComplexType, SchemaError> {
        if n.attribute("mixed") == Some("true") {
            return Err(SchemaError::Unsupported("mixed content".into()));
        }
        let mut out = ComplexType { sequence: Vec::new(), attributes: Vec::new() };
        for c in xs_children(n) {
            match c.tag_name().name() {
                "sequence" if out.sequence.is_empty() && out.attributes.is_empty() => {
                    for e in xs_children(c) {
                        if e.tag_name().name() != "element" {
                            return Err(unsupported(e));
                        }
                        out.sequence.push(self.element(e, false)?);
                    }
                }
                "attribute" => {
                    let name = c.attribute("name").ok_or_else(|| SchemaError::Unsupported("attribute ref".into()))?;
                    let ty = match (c.attribute("type"), xs_children(c).next()) {
                        (Some(t), _) => self.simple_type_ref(c, t)?,
                        (None, Some(st)) if st.tag_name().name() == "simpleType" => self.simple_type(st)?,
                        (None, None) => SimpleType::builtin(Builtin::String),
                        (None, Some(other)) => return Err(unsupported(other)),
                    };
                    let required = match c.attribute("use") {
                        None | Some("optional") => false,
                        Some("required") => true,
                        Some(other) => return Err(SchemaError::Unsupported(format!("attribute use {other:?}"))),
                    };
                    out.attributes.push(AttributeDecl { name: name.to_owned(), ty, required });
                }
                _ => return Err(unsupported(c)),
            }
        }
        Ok(out)
    }

    fn element(&mut self, n: Node<'a, 'input>, global: bool) -> Result<ElementDecl, SchemaError> {
        let name = n.attribute("name").ok_or_else(|| SchemaError::Unsupported("element ref".into()))?.to_owned();
        let min = parse_count(n.attribute("minOccurs"), 1)?.ok_or_else(|| SchemaError::Invalid("minOccurs unbounded".into()))?;
        let max = parse_count(n.attribute("maxOccurs"), 1)?;
        let content = match (n.attribute("type"), xs_children(n).next()) {
            (Some(t), _) => {
                let (ns, local) = self.resolve_qname(n, t);
                if ns.as_deref() != Some(XS) && self.complex.contains_key(local.as_str()) {
                    if self.stack.contains(&local) {
                        return Err(SchemaError::Unsupported(format!("recursive type {local:?}")));
                    }
                    self.stack.push(local.clone());
                    let node = self.complex[local.as_str()];
                    let ct = self.complex_type(node)?;
                    self.stack.pop();
                    Content::Complex(ct)
                } else {
                    Content::Simple(self.simple_type_ref(n, t)?)
                }
            }
            (None, Some(c)) if c.tag_name().name() == "complexType" => Content::Complex(self.complex_type(c)?),
            (None, Some(c)) if c.tag_name().name() == "simpleType" => Content::Simple(self.simple_type(c)?),
            (None, Some(c)) => return Err(unsupported(c)),
            (None, None) => Content::Simple(SimpleType::builtin(Builtin::String)),
        };
        let namespace = if global || self.qualified { self.target_ns.clone() } else { None };
        Ok(ElementDecl { name, namespace, min, max, content })
    }
}

impl Schema {
    pub fn parse(text: &str) -> Result<Schema, SchemaError> {
        let doc = Document::parse(text)?;
        let root = doc.root_element();
        if root.tag_name().namespace() != Some(XS) || root.tag_name().name() != "schema" {
            return Err(SchemaError::Invalid("root element is not xs:schema".into()));
        }
        let mut c = Compiler {
            target_ns: root.attribute("targetNamespace").map(str::to_owned),
            qualified: root.attribute("elementFormDefault") == Some("qualified"),
            simple: BTreeMap::new(),
            complex: BTreeMap::new(),
            stack: Vec::new(),
        };
        let mut globals = Vec::new();
        for n in xs_children(root) {
            let name = n.attribute("name");
            match (n.tag_name().name(), name) {
                ("simpleType", Some(name)) => {
                    c.simple.insert(name, n);
                }
                ("complexType", Some(name)) => {
                    c.complex.insert(name, n);
                }
                ("element", _) => globals.push(n),
                _ => return Err(unsupported(n)),
            }
        }
        let roots = globals.into_iter().map(|n| c.element(n, true)).collect::<Result<Vec<_>, _>>()?;
        if roots.is_empty() {
            return Err(SchemaError::Invalid("schema declares no global element".into()));
        }
        Ok(Schema { roots })
    }

    /// Validates a document. Returns every violation found, or the parse
    /// error as a single violation when the document is not well-formed.
    pub fn validate(&self, xml: &str) -> Result<(), Vec<Violation>> {
        let doc = Document::parse(xml).map_err(|e| vec![Violation { path: "/".into(), message: e.to_string() }])?;
        let root = doc.root_element();
        let mut out = Vec::new();
        match self.roots.iter().find(|d| matches_decl(d, root)) {
            Some(decl) => check_element(decl, root, &format!("/{}", decl.name), &mut out),
            None => out.push(Violation {
                path: format!("/{}", root.tag_name().name()),
                message: "root element is not declared by the schema".into(),
            }),
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }
}

fn matches_decl(d: &ElementDecl, n: Node) -> bool {
    n.tag_name().name() == d.name && n.tag_name().namespace() == d.namespace.as_deref()
}

fn check_element(decl: &ElementDecl, n: Node, path: &str, out: &mut Vec<Violation>) {
    let mut fail = |message: String| out.push(Violation { path: path.to_owned(), message });
    match &decl.content {
        Content::Simple(ty) => {
            if n.children().any(|c| c.is_element()) {
                fail("element content where only text is allowed".into());
                return;
            }
            if n.attributes().any(|a| a.namespace() != Some(XSI)) {
                fail("attributes on a simple-typed element".into());
            }
            let text: String = n.children().filter(|c| c.is_text()).filter_map(|c| c.text()).collect();
            if let Err(e) = ty.check(&text) {
                fail(e);
            }
        }
        Content::Complex(ct) => {
            for a in n.attributes().filter(|a| a.namespace() != Some(XSI)) {
                match ct.attributes.iter().find(|d| d.name == a.name() && a.namespace().is_none()) {
                    Some(d) => {
                        if let Err(e) = d.ty.check(a.value()) {
                            fail(format!("attribute {}: {e}", a.name()));
                        }
                    }
                    None => fail(format!("undeclared attribute {}", a.name())),
                }
            }
            for d in ct.attributes.iter().filter(|d| d.required) {
                if n.attribute(d.name.as_str()).is_none() {
                    fail(format!("missing required attribute {}", d.name));
                }
            }
            if n.children().any(|c| c.is_text() && c.text().is_some_and(|t| !t.trim().is_empty())) {
                fail("text content in an element-only type".into());
            }
            let kids: Vec<Node> = n.children().filter(|c| c.is_element()).collect();
            let mut i = 0;
            for particle in &ct.sequence {
                let mut seen = 0;
                while i < kids.len() && matches_decl(particle, kids[i]) && particle.max.is_none_or(|m| seen < m) {
                    seen += 1;
                    let p = if particle.max == Some(1) {
                        format!("{path}/{}", particle.name)
                    } else {
                        format!("{path}/{}[{seen}]", particle.name)
                    };
                    check_element(particle, kids[i], &p, out);
                    i += 1;
                }
                if seen < particle.min {
                    out.push(Violation {
                        path: path.to_owned(),
                        message: format!("expected at least {} <{}>, found {seen}", particle.min, particle.name),
                    });
                }
            }
            for extra in &kids[i..] {
                out.push(Violation { path: path.to_owned(), message: format!("unexpected element <{}>", extra.tag_name().name()) });
            }
        }
    }
}
