//! Plain-text category descriptions.
//!
//! The format is line oriented; `#` starts a comment that runs to the
//! end of the line. Sections may appear in any order:
//!
//! ```text
//! objects: a b
//! arrow: f : a -> b
//! compose: g . f = h
//! psc.btop: f -> x
//! psc.star: x * y = z
//! psc.iso: a = s
//! cocc.te: (h1 ; h2) -> k
//! ```
//!
//! Identities are generated automatically as `id_<obj>` and composites
//! involving an identity are inferred, so files only spell out the
//! non-trivial part of a composition table. A `cocc.te` entry binds
//! every commuting square with the given component pair.
//!
//! Parsing resolves every name and rejects duplicates; lowering turns a
//! parsed file into a validated category together with the structure
//! sections it declares. Printing emits a canonical form (sorted
//! composition and structure entries, identities omitted) on which
//! parse and print are mutually inverse.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::cat::{ArrId, CatError, CategoryBuilder, FiniteCategory, ObjId};
use crate::comma::{build_arrow_category, CommaError, LevelCaps};
use crate::symmetry::{CoccStructure, PscStructure, SymmetryError};

/// Rejections during parsing and name resolution.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}, column {col}: expected {expected}")]
    Syntax { line: usize, col: usize, expected: String },
    #[error("line {line}: unknown name `{name}`")]
    UnknownName { name: String, line: usize },
    #[error("duplicate definition of `{name}`")]
    Duplicate { name: String },
}

/// Rejections while turning a parsed file into validated structures.
#[derive(Debug, Error)]
pub enum LowerError {
    #[error("category laws fail: {0}")]
    Category(#[from] CatError),
    #[error("structure section rejected: {0}")]
    Symmetry(#[from] SymmetryError),
    #[error("arrow category over the base: {0}")]
    Level(#[from] CommaError),
    #[error("{section} is missing an entry for `{name}`")]
    Incomplete { section: &'static str, name: String },
    #[error("a cocc section requires a psc section")]
    CoccWithoutPsc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowDecl {
    pub name: String,
    pub dom: String,
    pub cod: String,
}

/// `second . first = result`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeDecl {
    pub second: String,
    pub first: String,
    pub result: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PscSection {
    /// `arrow -> object` value assignments.
    pub btop: Vec<(String, String)>,
    /// `x * y = z` table entries.
    pub star: Vec<(String, String, String)>,
    /// `object = arrow` representability picks.
    pub iso: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoccSection {
    /// `(h1 ; h2) -> k` component bindings.
    pub te: Vec<(String, String, String)>,
}

/// A parsed and name-resolved description. Identity arrows are not
/// stored: a declared `id_<obj>` line is checked and absorbed, and the
/// rest are implicit.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CategoryFile {
    pub objects: Vec<String>,
    pub arrows: Vec<ArrowDecl>,
    pub composites: Vec<CompositeDecl>,
    pub psc: Option<PscSection>,
    pub cocc: Option<CoccSection>,
}

/// The validated structures a file declares.
#[derive(Debug, Clone)]
pub struct LoweredFile {
    pub cat: Arc<FiniteCategory>,
    pub psc: Option<PscStructure>,
    pub cocc: Option<CoccStructure>,
}

fn is_name_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, ':' | '.' | '=' | '*' | '(' | ')' | ';' | '#' | '<' | '>' | '-')
}

struct Cursor<'a> {
    line: &'a str,
    lineno: usize,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn col(&self) -> usize {
        self.line[..self.pos].chars().count() + 1
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.line[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn syntax(&self, expected: impl Into<String>) -> FormatError {
        FormatError::Syntax { line: self.lineno, col: self.col(), expected: expected.into() }
    }

    fn name(&mut self, what: &str) -> Result<(String, usize), FormatError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.line[self.pos..].chars().next() {
            if is_name_char(c) {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(self.syntax(what));
        }
        Ok((self.line[start..self.pos].to_string(), self.lineno))
    }

    fn token(&mut self, tok: &str) -> Result<(), FormatError> {
        self.skip_ws();
        if self.line[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            Ok(())
        } else {
            Err(self.syntax(format!("`{tok}`")))
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.line.len()
    }

    fn end(&mut self) -> Result<(), FormatError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.syntax("end of line"))
        }
    }
}

/// One raw declaration with its source line, before resolution.
enum RawLine {
    Objects(Vec<(String, usize)>),
    Arrow { name: (String, usize), dom: (String, usize), cod: (String, usize) },
    Compose { second: (String, usize), first: (String, usize), result: (String, usize) },
    Btop { arrow: (String, usize), obj: (String, usize) },
    Star { x: (String, usize), y: (String, usize), z: (String, usize) },
    Iso { obj: (String, usize), arrow: (String, usize) },
    Te { h1: (String, usize), h2: (String, usize), k: (String, usize) },
}

/// Parses a description and resolves every referenced name.
pub fn parse_category_file(text: &str) -> Result<CategoryFile, FormatError> {
    let mut raw = Vec::new();
    for (i, full_line) in text.lines().enumerate() {
        let lineno = i + 1;
        let body = match full_line.find('#') {
            Some(p) => &full_line[..p],
            None => full_line,
        };
        if body.trim().is_empty() {
            continue;
        }
        let Some(colon) = body.find(':') else {
            let c = Cursor { line: full_line, lineno, pos: 0 };
            return Err(c.syntax("a `keyword:` prefix"));
        };
        let keyword = body[..colon].trim();
        let mut c = Cursor { line: body, lineno, pos: colon + 1 };
        let parsed = match keyword {
            "objects" => {
                let mut names = Vec::new();
                names.push(c.name("an object name")?);
                while !c.at_end() {
                    names.push(c.name("an object name")?);
                }
                RawLine::Objects(names)
            }
            "arrow" => {
                let name = c.name("an arrow name")?;
                c.token(":")?;
                let dom = c.name("an object name")?;
                c.token("->")?;
                let cod = c.name("an object name")?;
                c.end()?;
                RawLine::Arrow { name, dom, cod }
            }
            "compose" => {
                let second = c.name("an arrow name")?;
                c.token(".")?;
                let first = c.name("an arrow name")?;
                c.token("=")?;
                let result = c.name("an arrow name")?;
                c.end()?;
                RawLine::Compose { second, first, result }
            }
            "psc.btop" => {
                let arrow = c.name("an arrow name")?;
                c.token("->")?;
                let obj = c.name("an object name")?;
                c.end()?;
                RawLine::Btop { arrow, obj }
            }
            "psc.star" => {
                let x = c.name("an object name")?;
                c.token("*")?;
                let y = c.name("an object name")?;
                c.token("=")?;
                let z = c.name("an object name")?;
                c.end()?;
                RawLine::Star { x, y, z }
            }
            "psc.iso" => {
                let obj = c.name("an object name")?;
                c.token("=")?;
                let arrow = c.name("an arrow name")?;
                c.end()?;
                RawLine::Iso { obj, arrow }
            }
            "cocc.te" => {
                c.token("(")?;
                let h1 = c.name("an arrow name")?;
                c.token(";")?;
                let h2 = c.name("an arrow name")?;
                c.token(")")?;
                c.token("->")?;
                let k = c.name("an arrow name")?;
                c.end()?;
                RawLine::Te { h1, h2, k }
            }
            _ => {
                let mut c = Cursor { line: body, lineno, pos: 0 };
                c.skip_ws();
                return Err(c.syntax(
                    "one of objects, arrow, compose, psc.btop, psc.star, psc.iso, cocc.te",
                ));
            }
        };
        raw.push(parsed);
    }
    resolve(raw)
}

fn resolve(raw: Vec<RawLine>) -> Result<CategoryFile, FormatError> {
    let mut objects: Vec<String> = Vec::new();
    let mut object_set: BTreeSet<String> = BTreeSet::new();
    for line in &raw {
        if let RawLine::Objects(names) = line {
            for (name, _) in names {
                if !object_set.insert(name.clone()) {
                    return Err(FormatError::Duplicate { name: name.clone() });
                }
                objects.push(name.clone());
            }
        }
    }

    let identity_name = |obj: &str| format!("id_{obj}");
    let mut arrows: Vec<ArrowDecl> = Vec::new();
    let mut arrow_set: BTreeSet<String> =
        objects.iter().map(|o| identity_name(o)).collect();
    let mut declared: BTreeSet<String> = BTreeSet::new();
    for line in &raw {
        if let RawLine::Arrow { name, dom, cod } = line {
            let (name, nline) = name;
            if !declared.insert(name.clone()) {
                return Err(FormatError::Duplicate { name: name.clone() });
            }
            for (endpoint, eline) in [dom, cod] {
                if !object_set.contains(endpoint) {
                    return Err(FormatError::UnknownName {
                        name: endpoint.clone(),
                        line: *eline,
                    });
                }
            }
            let is_identity = objects.iter().any(|o| identity_name(o) == *name);
            if is_identity {
                let obj = &name["id_".len()..];
                if dom.0 != obj || cod.0 != obj {
                    return Err(FormatError::Syntax {
                        line: *nline,
                        col: 1,
                        expected: format!("identity arrow `{name}` to go {obj} -> {obj}"),
                    });
                }
                continue;
            }
            arrow_set.insert(name.clone());
            arrows.push(ArrowDecl { name: name.clone(), dom: dom.0.clone(), cod: cod.0.clone() });
        }
    }

    let check_arrow = |(name, line): &(String, usize)| -> Result<(), FormatError> {
        if arrow_set.contains(name) {
            Ok(())
        } else {
            Err(FormatError::UnknownName { name: name.clone(), line: *line })
        }
    };
    let check_object = |(name, line): &(String, usize)| -> Result<(), FormatError> {
        if object_set.contains(name) {
            Ok(())
        } else {
            Err(FormatError::UnknownName { name: name.clone(), line: *line })
        }
    };

    let mut composites = Vec::new();
    let mut compose_keys = BTreeSet::new();
    let mut psc: Option<PscSection> = None;
    let mut btop_keys = BTreeSet::new();
    let mut star_keys = BTreeSet::new();
    let mut iso_keys = BTreeSet::new();
    let mut cocc: Option<CoccSection> = None;
    let mut te_keys = BTreeSet::new();
    for line in &raw {
        match line {
            RawLine::Objects(_) | RawLine::Arrow { .. } => {}
            RawLine::Compose { second, first, result } => {
                for n in [second, first, result] {
                    check_arrow(n)?;
                }
                if !compose_keys.insert((second.0.clone(), first.0.clone())) {
                    return Err(FormatError::Duplicate {
                        name: format!("compose {} . {}", second.0, first.0),
                    });
                }
                composites.push(CompositeDecl {
                    second: second.0.clone(),
                    first: first.0.clone(),
                    result: result.0.clone(),
                });
            }
            RawLine::Btop { arrow, obj } => {
                check_arrow(arrow)?;
                check_object(obj)?;
                if !btop_keys.insert(arrow.0.clone()) {
                    return Err(FormatError::Duplicate {
                        name: format!("psc.btop {}", arrow.0),
                    });
                }
                psc.get_or_insert_with(Default::default)
                    .btop
                    .push((arrow.0.clone(), obj.0.clone()));
            }
            RawLine::Star { x, y, z } => {
                for n in [x, y, z] {
                    check_object(n)?;
                }
                if !star_keys.insert((x.0.clone(), y.0.clone())) {
                    return Err(FormatError::Duplicate {
                        name: format!("psc.star {} * {}", x.0, y.0),
                    });
                }
                psc.get_or_insert_with(Default::default).star.push((
                    x.0.clone(),
                    y.0.clone(),
                    z.0.clone(),
                ));
            }
            RawLine::Iso { obj, arrow } => {
                check_object(obj)?;
                check_arrow(arrow)?;
                if !iso_keys.insert(obj.0.clone()) {
                    return Err(FormatError::Duplicate {
                        name: format!("psc.iso {}", obj.0),
                    });
                }
                psc.get_or_insert_with(Default::default)
                    .iso
                    .push((obj.0.clone(), arrow.0.clone()));
            }
            RawLine::Te { h1, h2, k } => {
                for n in [h1, h2, k] {
                    check_arrow(n)?;
                }
                if !te_keys.insert((h1.0.clone(), h2.0.clone())) {
                    return Err(FormatError::Duplicate {
                        name: format!("cocc.te ({} ; {})", h1.0, h2.0),
                    });
                }
                cocc.get_or_insert_with(Default::default).te.push((
                    h1.0.clone(),
                    h2.0.clone(),
                    k.0.clone(),
                ));
            }
        }
    }

    Ok(CategoryFile { objects, arrows, composites, psc, cocc })
}

/// Emits the canonical text: one objects line, arrows in declaration
/// order, composition and structure entries sorted by name, identities
/// and their composites left implicit.
pub fn print_category_file(file: &CategoryFile) -> String {
    let mut out = String::new();
    if !file.objects.is_empty() {
        let _ = writeln!(out, "objects: {}", file.objects.join(" "));
    }
    for a in &file.arrows {
        let _ = writeln!(out, "arrow: {} : {} -> {}", a.name, a.dom, a.cod);
    }
    let identities: BTreeSet<String> =
        file.objects.iter().map(|o| format!("id_{o}")).collect();
    let mut comps: Vec<&CompositeDecl> = file
        .composites
        .iter()
        .filter(|c| !identities.contains(&c.second) && !identities.contains(&c.first))
        .collect();
    comps.sort_by(|a, b| (&a.second, &a.first).cmp(&(&b.second, &b.first)));
    for c in comps {
        let _ = writeln!(out, "compose: {} . {} = {}", c.second, c.first, c.result);
    }
    if let Some(psc) = &file.psc {
        let mut btop = psc.btop.clone();
        btop.sort();
        for (arrow, obj) in btop {
            let _ = writeln!(out, "psc.btop: {arrow} -> {obj}");
        }
        let mut star = psc.star.clone();
        star.sort();
        for (x, y, z) in star {
            let _ = writeln!(out, "psc.star: {x} * {y} = {z}");
        }
        let mut iso = psc.iso.clone();
        iso.sort();
        for (obj, arrow) in iso {
            let _ = writeln!(out, "psc.iso: {obj} = {arrow}");
        }
    }
    if let Some(cocc) = &file.cocc {
        let mut te = cocc.te.clone();
        te.sort();
        for (h1, h2, k) in te {
            let _ = writeln!(out, "cocc.te: ({h1} ; {h2}) -> {k}");
        }
    }
    out
}

impl CategoryFile {
    /// Builds the validated category and the declared structures. `caps`
    /// bounds the arrow category materialized for a cocc section.
    pub fn lower(&self, caps: LevelCaps) -> Result<LoweredFile, LowerError> {
        let mut cb = CategoryBuilder::new();
        let mut obj_ids: HashMap<&str, ObjId> = HashMap::new();
        for name in &self.objects {
            obj_ids.insert(name, cb.object(name));
        }
        let mut arr_ids: HashMap<String, ArrId> = HashMap::new();
        for a in &self.arrows {
            let id = cb.arrow(&a.name, obj_ids[a.dom.as_str()], obj_ids[a.cod.as_str()]);
            arr_ids.insert(a.name.clone(), id);
        }
        cb.auto_identities();
        for name in &self.objects {
            arr_ids.insert(format!("id_{name}"), cb.identity_of(obj_ids[name.as_str()]));
        }
        cb.infer_identity_composites();
        for c in &self.composites {
            cb.composite(arr_ids[&c.second], arr_ids[&c.first], arr_ids[&c.result]);
        }
        let cat = Arc::new(cb.build()?);

        let psc = match &self.psc {
            None => None,
            Some(section) => {
                let mut btop: Vec<Option<ObjId>> = vec![None; cat.n_arrows()];
                for (arrow, obj) in &section.btop {
                    btop[arr_ids[arrow].idx()] = Some(obj_ids[obj.as_str()]);
                }
                let btop: Vec<ObjId> = btop
                    .into_iter()
                    .enumerate()
                    .map(|(i, v)| {
                        v.ok_or_else(|| LowerError::Incomplete {
                            section: "psc.btop",
                            name: cat.arr_name(ArrId(i as u32)).to_string(),
                        })
                    })
                    .collect::<Result<_, _>>()?;
                let star: BTreeMap<(ObjId, ObjId), ObjId> = section
                    .star
                    .iter()
                    .map(|(x, y, z)| {
                        ((obj_ids[x.as_str()], obj_ids[y.as_str()]), obj_ids[z.as_str()])
                    })
                    .collect();
                let mut iso: Vec<Option<ArrId>> = vec![None; cat.n_objects()];
                for (obj, arrow) in &section.iso {
                    iso[obj_ids[obj.as_str()].idx()] = Some(arr_ids[arrow]);
                }
                let iso: Vec<ArrId> = iso
                    .into_iter()
                    .enumerate()
                    .map(|(i, v)| {
                        v.ok_or_else(|| LowerError::Incomplete {
                            section: "psc.iso",
                            name: cat.obj_name(ObjId(i as u32)).to_string(),
                        })
                    })
                    .collect::<Result<_, _>>()?;
                Some(PscStructure::new(cat.clone(), btop, star, iso)?)
            }
        };

        let cocc = match &self.cocc {
            None => None,
            Some(section) => {
                let psc = psc.clone().ok_or(LowerError::CoccWithoutPsc)?;
                let level = Arc::new(build_arrow_category(&cat, caps)?);
                let bindings: BTreeMap<(ArrId, ArrId), ArrId> = section
                    .te
                    .iter()
                    .map(|(h1, h2, k)| ((arr_ids[h1], arr_ids[h2]), arr_ids[k]))
                    .collect();
                Some(CoccStructure::from_component_bindings(psc, level, &bindings)?)
            }
        };

        Ok(LoweredFile { cat, psc, cocc })
    }
}

/// Renames a category's objects and arrows to plain grammar-safe tokens
/// (`o0`, `o1`, .. and `m0`, `m1`, ..) and returns the description
/// alongside back-map lines `token = original name`. Identities and
/// their composites are left implicit, so reparsing reproduces the same
/// shape with identities regenerated as `id_<token>`.
pub fn tokenize_category(cat: &FiniteCategory) -> (CategoryFile, Vec<String>) {
    let mut back_map = Vec::new();
    let mut obj_tok: Vec<String> = Vec::with_capacity(cat.n_objects());
    for o in cat.objects() {
        let tok = format!("o{}", o.idx());
        back_map.push(format!("{tok} = {}", cat.obj_name(o)));
        obj_tok.push(tok);
    }
    let identities: BTreeSet<ArrId> = cat.objects().map(|o| cat.identity(o)).collect();
    let mut arr_tok: HashMap<ArrId, String> = HashMap::new();
    let mut arrows = Vec::new();
    let mut next = 0usize;
    for f in cat.arrows() {
        if identities.contains(&f) {
            continue;
        }
        let tok = format!("m{next}");
        next += 1;
        back_map.push(format!("{tok} = {}", cat.arr_name(f)));
        arrows.push(ArrowDecl {
            name: tok.clone(),
            dom: obj_tok[cat.dom(f).idx()].clone(),
            cod: obj_tok[cat.cod(f).idx()].clone(),
        });
        arr_tok.insert(f, tok);
    }
    for o in cat.objects() {
        arr_tok.insert(cat.identity(o), format!("id_{}", obj_tok[o.idx()]));
    }
    let mut composites = Vec::new();
    for f in cat.arrows() {
        for g in cat.arrows() {
            if identities.contains(&f) || identities.contains(&g) {
                continue;
            }
            if cat.dom(g) != cat.cod(f) {
                continue;
            }
            composites.push(CompositeDecl {
                second: arr_tok[&g].clone(),
                first: arr_tok[&f].clone(),
                result: arr_tok[&cat.comp(g, f)].clone(),
            });
        }
    }
    let file = CategoryFile {
        objects: obj_tok,
        arrows,
        composites,
        psc: None,
        cocc: None,
    };
    (file, back_map)
}
