//! Declaration-level Java parser.
//!
//! Recognizes package/import headers, type declarations and their members.
//! Method bodies are not parsed into statements; a linear scan records
//! local declarations, call expressions (with a description of the
//! receiver) and bare identifier uses that may be field accesses.

use std::collections::HashMap;

use super::lexer::{lex, Tok, Token};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: u32,
    pub message: String,
}

type PResult<T> = Result<T, ParseError>;

#[derive(Clone, Debug, Default)]
pub struct CompilationUnit {
    pub package: Option<String>,
    pub imports: Vec<Import>,
    pub types: Vec<TypeDecl>,
    /// Comment text preceding the first token.
    pub header: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Import {
    pub path: String,
    pub is_static: bool,
    pub wildcard: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeKind {
    Class,
    Interface,
    Enum,
    Record,
    Annotation,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Modifiers {
    pub is_static: bool,
    pub is_abstract: bool,
    pub is_private: bool,
}

#[derive(Clone, Debug)]
pub struct TypeDecl {
    pub name: String,
    pub kind: TypeKind,
    pub modifiers: Modifiers,
    pub annotations: Vec<String>,
    pub extends: Vec<String>,
    pub implements: Vec<String>,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodDecl>,
    pub nested: Vec<TypeDecl>,
    pub start_line: u32,
    pub end_line: u32,
    /// Anonymous or method-local; named by the caller.
    pub local: bool,
}

#[derive(Clone, Debug)]
pub struct FieldDecl {
    pub name: String,
    pub ty: String,
    pub modifiers: Modifiers,
    pub line: u32,
}

#[derive(Clone, Debug)]
pub struct Param {
    pub ty: String,
    pub name: String,
}

#[derive(Clone, Debug)]
pub struct MethodDecl {
    pub name: String,
    pub is_constructor: bool,
    pub params: Vec<Param>,
    pub return_type: Option<String>,
    pub modifiers: Modifiers,
    pub annotations: Vec<String>,
    pub start_line: u32,
    pub end_line: u32,
    pub has_body: bool,
    pub body: Body,
}

/// What a linear scan of a method body found.
#[derive(Clone, Debug, Default)]
pub struct Body {
    pub locals: Vec<Param>,
    pub calls: Vec<CallSite>,
    pub name_uses: Vec<NameUse>,
    /// Anonymous and local classes declared inside the body.
    pub local_types: Vec<TypeDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Receiver {
    /// `foo()`
    Implicit,
    /// `this.foo()`
    This,
    /// `super.foo()`
    Super,
    /// `a.foo()` or `a.b.foo()`; a leading `this` is kept as a segment.
    Path(Vec<String>),
    /// Result of an earlier call in the same body: `x().foo()`.
    Call(usize),
    /// A cast or a literal of known type: `((Foo) x).foo()`.
    Typed(String),
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CallKind {
    Method,
    /// `new T(..)`; `name` holds the instantiated type.
    New,
    /// `this(..)` / `super(..)` constructor chaining.
    ThisCtor,
    SuperCtor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CallSite {
    pub kind: CallKind,
    pub receiver: Receiver,
    pub name: String,
    pub arity: usize,
    pub line: u32,
    /// Index into `Body::local_types` for `new T() { .. }`.
    pub anonymous: Option<usize>,
}

/// An identifier that is not a call, not a declaration and not preceded
/// by a dot, or `this.x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NameUse {
    pub name: String,
    pub line: u32,
    pub explicit_this: bool,
}

const MODIFIERS: &[&str] = &[
    "public",
    "protected",
    "private",
    "static",
    "final",
    "abstract",
    "native",
    "synchronized",
    "transient",
    "volatile",
    "strictfp",
    "default",
    "sealed",
];

const KEYWORDS: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally",
    "float", "for", "goto", "if", "implements", "import", "instanceof", "int", "interface",
    "long", "native", "new", "package", "private", "protected", "public", "return", "short",
    "static", "strictfp", "super", "switch", "synchronized", "this", "throw", "throws",
    "transient", "try", "void", "volatile", "while", "true", "false", "null", "var", "yield",
    "record",
];

const PRIMITIVES: &[&str] = &[
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void", "var",
];

fn is_keyword(w: &str) -> bool {
    KEYWORDS.contains(&w)
}

pub fn parse(src: &str) -> PResult<CompilationUnit> {
    let lexed = lex(src).map_err(|e| ParseError {
        line: e.line,
        message: e.message,
    })?;
    let mut p = Parser {
        toks: lexed.tokens,
        pos: 0,
    };
    let mut unit = p.compilation_unit()?;
    unit.header = lexed.header;
    Ok(unit)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn at(&self, offset: usize) -> Option<&Token> {
        self.toks.get(self.pos + offset)
    }

    fn line(&self) -> u32 {
        self.peek()
            .or_else(|| self.toks.last())
            .map_or(1, |t| t.line)
    }

    fn err<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError {
            line: self.line(),
            message: message.into(),
        })
    }

    fn is(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.is(p))
    }

    fn is_word(&self, w: &str) -> bool {
        self.peek().is_some_and(|t| t.is_word(w))
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.is(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> PResult<()> {
        if self.eat(p) {
            Ok(())
        } else {
            self.err(format!("expected `{p}`"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().and_then(|t| t.ident()) {
            Some(w) => {
                let w = w.to_string();
                self.pos += 1;
                Ok(w)
            }
            None => self.err("expected identifier"),
        }
    }

    fn dotted_name(&mut self) -> PResult<String> {
        let mut name = self.ident()?;
        while self.is(".") && self.at(1).and_then(|t| t.ident()).is_some() {
            self.pos += 1;
            name.push('.');
            name.push_str(&self.ident()?);
        }
        Ok(name)
    }

    fn compilation_unit(&mut self) -> PResult<CompilationUnit> {
        let mut unit = CompilationUnit::default();
        let annotations_start = self.pos;
        self.annotations()?;
        if self.eat_word("package") {
            unit.package = Some(self.dotted_name()?);
            self.expect(";")?;
        } else {
            self.pos = annotations_start;
        }
        while self.is_word("import") {
            self.pos += 1;
            let is_static = self.eat_word("static");
            let path = self.dotted_name()?;
            let wildcard = if self.eat(".") {
                self.expect("*")?;
                true
            } else {
                false
            };
            self.expect(";")?;
            unit.imports.push(Import {
                path,
                is_static,
                wildcard,
            });
        }
        while self.peek().is_some() {
            if self.eat(";") {
                continue;
            }
            let (modifiers, annotations) = self.modifiers()?;
            unit.types.push(self.type_decl(modifiers, annotations)?);
        }
        Ok(unit)
    }

    fn annotations(&mut self) -> PResult<Vec<String>> {
        let mut out = Vec::new();
        while self.is("@") && !self.at(1).is_some_and(|t| t.is_word("interface")) {
            self.pos += 1;
            let name = self.dotted_name()?;
            if self.is("(") {
                self.skip_group("(", ")")?;
            }
            out.push(name.rsplit('.').next().unwrap_or(&name).to_string());
        }
        Ok(out)
    }

    fn modifiers(&mut self) -> PResult<(Modifiers, Vec<String>)> {
        let mut m = Modifiers::default();
        let mut annotations = Vec::new();
        loop {
            annotations.extend(self.annotations()?);
            let Some(w) = self.peek().and_then(|t| t.ident()) else {
                break;
            };
            if w == "non" && self.at(1).is_some_and(|t| t.is("-")) {
                self.pos += 3;
                continue;
            }
            // `default` doubles as a switch label; only treat it as a
            // modifier when a declaration follows.
            if !MODIFIERS.contains(&w) || (w == "sealed" && self.at(1).is_some_and(|t| t.is("("))) {
                break;
            }
            match w {
                "static" => m.is_static = true,
                "abstract" => m.is_abstract = true,
                "private" => m.is_private = true,
                _ => {}
            }
            self.pos += 1;
        }
        Ok((m, annotations))
    }

    /// Skips a balanced group starting at the current `open` token.
    fn skip_group(&mut self, open: &str, close: &str) -> PResult<usize> {
        let start_line = self.line();
        let start = self.pos;
        self.expect(open)?;
        let mut depth = 1;
        while let Some(t) = self.peek() {
            if t.is(open) {
                depth += 1;
            } else if t.is(close) {
                depth -= 1;
                if depth == 0 {
                    self.pos += 1;
                    return Ok(start);
                }
            }
            self.pos += 1;
        }
        Err(ParseError {
            line: start_line,
            message: format!("unbalanced `{open}`"),
        })
    }

    fn type_params(&mut self) -> PResult<()> {
        if self.is("<") {
            self.skip_group("<", ">")?;
        }
        Ok(())
    }

    /// Parses a type reference, returning its erasure (generic arguments
    /// dropped, array dimensions kept as `[]`).
    fn type_ref(&mut self) -> PResult<String> {
        self.annotations()?;
        let mut name = self.ident()?;
        if is_keyword(&name) && !PRIMITIVES.contains(&name.as_str()) {
            self.pos -= 1;
            return self.err(format!("unexpected `{name}`"));
        }
        loop {
            if self.is("<") {
                self.skip_group("<", ">")?;
            }
            if self.is(".") && self.at(1).and_then(|t| t.ident()).is_some() {
                self.pos += 1;
                name.push('.');
                name.push_str(&self.ident()?);
                continue;
            }
            break;
        }
        while self.is("[") && self.at(1).is_some_and(|t| t.is("]")) {
            self.pos += 2;
            name.push_str("[]");
        }
        if self.eat("...") {
            name.push_str("[]");
        }
        Ok(name)
    }

    fn type_list(&mut self) -> PResult<Vec<String>> {
        let mut out = vec![self.type_ref()?];
        while self.eat(",") {
            out.push(self.type_ref()?);
        }
        Ok(out)
    }

    fn type_decl(&mut self, modifiers: Modifiers, annotations: Vec<String>) -> PResult<TypeDecl> {
        let start_line = self.line();
        let kind = if self.eat_word("class") {
            TypeKind::Class
        } else if self.eat_word("interface") {
            TypeKind::Interface
        } else if self.eat_word("enum") {
            TypeKind::Enum
        } else if self.eat_word("record") {
            TypeKind::Record
        } else if self.is("@") && self.at(1).is_some_and(|t| t.is_word("interface")) {
            self.pos += 2;
            TypeKind::Annotation
        } else {
            return self.err("expected a type declaration");
        };
        let name = self.ident()?;
        self.type_params()?;
        let mut decl = TypeDecl {
            name,
            kind,
            modifiers,
            annotations,
            extends: Vec::new(),
            implements: Vec::new(),
            fields: Vec::new(),
            methods: Vec::new(),
            nested: Vec::new(),
            start_line,
            end_line: start_line,
            local: false,
        };
        if kind == TypeKind::Record {
            for p in self.params()? {
                decl.fields.push(FieldDecl {
                    name: p.name,
                    ty: p.ty,
                    modifiers: Modifiers {
                        is_private: true,
                        ..Default::default()
                    },
                    line: start_line,
                });
            }
        }
        if self.eat_word("extends") {
            decl.extends = self.type_list()?;
        }
        if self.eat_word("implements") {
            decl.implements = self.type_list()?;
        }
        if self.eat_word("permits") {
            self.type_list()?;
        }
        // interfaces list their supertypes under `extends`
        if kind == TypeKind::Interface {
            decl.implements = std::mem::take(&mut decl.extends);
        }
        self.class_body(&mut decl)?;
        Ok(decl)
    }

    fn class_body(&mut self, decl: &mut TypeDecl) -> PResult<()> {
        self.expect("{")?;
        if decl.kind == TypeKind::Enum {
            self.enum_constants(decl)?;
        }
        loop {
            match self.peek() {
                None => return self.err(format!("unterminated body of `{}`", decl.name)),
                Some(t) if t.is("}") => {
                    decl.end_line = t.line;
                    self.pos += 1;
                    return Ok(());
                }
                _ => {}
            }
            if self.eat(";") {
                continue;
            }
            self.member(decl)?;
        }
    }

    fn enum_constants(&mut self, decl: &mut TypeDecl) -> PResult<()> {
        loop {
            self.annotations()?;
            if self.is(";") {
                self.pos += 1;
                return Ok(());
            }
            if self.is("}") {
                return Ok(());
            }
            let line = self.line();
            let name = self.ident()?;
            if self.is("(") {
                self.skip_group("(", ")")?;
            }
            if self.is("{") {
                self.skip_group("{", "}")?;
            }
            decl.fields.push(FieldDecl {
                name,
                ty: decl.name.clone(),
                modifiers: Modifiers {
                    is_static: true,
                    ..Default::default()
                },
                line,
            });
            if !self.eat(",") {
                if self.is("}") {
                    return Ok(());
                }
                self.expect(";")?;
                return Ok(());
            }
        }
    }

    fn member(&mut self, decl: &mut TypeDecl) -> PResult<()> {
        let start_line = self.line();
        let (modifiers, annotations) = self.modifiers()?;
        if self.is("{") {
            // initializer block
            self.skip_group("{", "}")?;
            return Ok(());
        }
        if ["class", "interface", "enum"].iter().any(|w| self.is_word(w))
            || (self.is_word("record") && self.at(1).and_then(|t| t.ident()).is_some())
            || (self.is("@") && self.at(1).is_some_and(|t| t.is_word("interface")))
        {
            let nested = self.type_decl(modifiers, annotations)?;
            decl.nested.push(nested);
            return Ok(());
        }
        self.type_params()?;
        let is_ctor = self.is_word(&decl.name) && self.at(1).is_some_and(|t| t.is("("));
        let (return_type, name) = if is_ctor {
            (None, self.ident()?)
        } else if decl.kind == TypeKind::Record
            && self.is_word(&decl.name)
            && self.at(1).is_some_and(|t| t.is("{"))
        {
            // compact canonical constructor
            let name = self.ident()?;
            let body_start = self.pos;
            self.skip_group("{", "}")?;
            let body = scan_body(&self.toks[body_start + 1..self.pos - 1])?;
            decl.methods.push(MethodDecl {
                name,
                is_constructor: true,
                params: Vec::new(),
                return_type: None,
                modifiers,
                annotations,
                start_line,
                end_line: self.toks[self.pos - 1].line,
                has_body: true,
                body,
            });
            return Ok(());
        } else {
            let ty = self.type_ref()?;
            (Some(ty), self.ident()?)
        };
        if self.is("(") {
            let params = self.params()?;
            let mut return_type = return_type;
            while self.is("[") && self.at(1).is_some_and(|t| t.is("]")) {
                self.pos += 2;
                if let Some(rt) = return_type.as_mut() {
                    rt.push_str("[]");
                }
            }
            if self.eat_word("throws") {
                self.type_list()?;
            }
            if self.eat_word("default") {
                self.skip_expression()?;
            }
            let has_body = self.is("{");
            let (body, end_line) = if has_body {
                let start = self.pos;
                self.skip_group("{", "}")?;
                let end_line = self.toks[self.pos - 1].line;
                (scan_body(&self.toks[start + 1..self.pos - 1])?, end_line)
            } else {
                let end_line = self.line();
                self.expect(";")?;
                (Body::default(), end_line)
            };
            decl.methods.push(MethodDecl {
                name,
                is_constructor: is_ctor,
                params,
                return_type,
                modifiers,
                annotations,
                start_line,
                end_line,
                has_body,
                body,
            });
            return Ok(());
        }
        let ty = return_type.expect("fields always carry a type");
        let mut name = name;
        loop {
            let mut field_ty = ty.clone();
            while self.is("[") && self.at(1).is_some_and(|t| t.is("]")) {
                self.pos += 2;
                field_ty.push_str("[]");
            }
            decl.fields.push(FieldDecl {
                name,
                ty: field_ty,
                modifiers: modifiers.clone(),
                line: start_line,
            });
            if self.eat("=") {
                self.skip_expression()?;
            }
            if self.eat(",") {
                name = self.ident()?;
                continue;
            }
            self.expect(";")?;
            return Ok(());
        }
    }

    /// Skips to the next `,` or `;` at nesting depth zero.
    fn skip_expression(&mut self) -> PResult<()> {
        loop {
            let Some(t) = self.peek() else {
                return self.err("unterminated expression");
            };
            if t.is(",") || t.is(";") {
                return Ok(());
            }
            if t.is("}") || t.is(")") || t.is("]") {
                return self.err("unexpected closing bracket");
            }
            if t.is("(") {
                self.skip_group("(", ")")?;
            } else if t.is("{") {
                self.skip_group("{", "}")?;
            } else if t.is("[") {
                self.skip_group("[", "]")?;
            } else {
                self.pos += 1;
            }
        }
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect("(")?;
        let mut out = Vec::new();
        if self.eat(")") {
            return Ok(out);
        }
        loop {
            self.modifiers()?;
            let ty = self.type_ref()?;
            let name = self.ident()?;
            let mut ty = ty;
            while self.is("[") && self.at(1).is_some_and(|t| t.is("]")) {
                self.pos += 2;
                ty.push_str("[]");
            }
            if name != "this" {
                out.push(Param { ty, name });
            }
            if self.eat(")") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }
}

/// Index of the token closing the group opened at `open`.
fn matching(toks: &[Token], open: usize) -> Option<usize> {
    let (o, c) = match &toks[open].tok {
        Tok::Punct("(") => ("(", ")"),
        Tok::Punct("{") => ("{", "}"),
        Tok::Punct("[") => ("[", "]"),
        _ => return None,
    };
    let mut depth = 0usize;
    for (i, t) in toks.iter().enumerate().skip(open) {
        if t.is(o) {
            depth += 1;
        } else if t.is(c) {
            depth -= 1;
            if depth == 0 {
                return Some(i);
            }
        }
    }
    None
}

/// Index of the token opening the group closed at `close`.
fn matching_back(toks: &[Token], close: usize) -> Option<usize> {
    let (o, c) = match &toks[close].tok {
        Tok::Punct(")") => ("(", ")"),
        Tok::Punct("}") => ("{", "}"),
        Tok::Punct("]") => ("[", "]"),
        _ => return None,
    };
    let mut depth = 0usize;
    for i in (0..=close).rev() {
        let t = &toks[i];
        if t.is(c) {
            depth += 1;
        } else if t.is(o) {
            depth -= 1;
            if depth == 0 {
                return Some(i);
            }
        }
    }
    None
}

/// Tries to read generic arguments `<...>` at `i`; returns the index after
/// the closing `>`.
fn generic_args_end(toks: &[Token], i: usize) -> Option<usize> {
    if !toks.get(i)?.is("<") {
        return None;
    }
    let mut depth = 0usize;
    let mut j = i;
    while let Some(t) = toks.get(j) {
        match &t.tok {
            Tok::Punct("<") => depth += 1,
            Tok::Punct(">") => {
                depth -= 1;
                if depth == 0 {
                    return Some(j + 1);
                }
            }
            Tok::Punct("," | "." | "?" | "[" | "]" | "&" | "@") => {}
            Tok::Ident(_) => {}
            _ => return None,
        }
        j += 1;
    }
    None
}

/// Reads a type at `i` in a body: `a.b.C<..>[]`. Returns erasure and the
/// next index.
fn body_type(toks: &[Token], i: usize) -> Option<(String, usize)> {
    let first = toks.get(i)?.ident()?;
    if is_keyword(first) && !PRIMITIVES.contains(&first) {
        return None;
    }
    let mut name = first.to_string();
    let mut j = i + 1;
    loop {
        if let Some(end) = generic_args_end(toks, j) {
            j = end;
        }
        if toks.get(j).is_some_and(|t| t.is(".")) {
            if let Some(w) = toks.get(j + 1).and_then(|t| t.ident()) {
                name.push('.');
                name.push_str(w);
                j += 2;
                continue;
            }
        }
        break;
    }
    while toks.get(j).is_some_and(|t| t.is("[")) && toks.get(j + 1).is_some_and(|t| t.is("]")) {
        name.push_str("[]");
        j += 2;
    }
    if toks.get(j).is_some_and(|t| t.is("...")) {
        name.push_str("[]");
        j += 1;
    }
    Some((name, j))
}

fn arity(toks: &[Token], open: usize, close: usize) -> usize {
    if close == open + 1 {
        return 0;
    }
    let mut depth = 0i32;
    let mut commas = 0;
    let mut j = open + 1;
    while j < close {
        let t = &toks[j];
        if t.ident().is_some_and(|w| w.starts_with(|c: char| c.is_ascii_uppercase())) {
            if let Some(end) = generic_args_end(toks, j + 1) {
                j = end;
                continue;
            }
        }
        match &t.tok {
            Tok::Punct("(" | "{" | "[") => depth += 1,
            Tok::Punct(")" | "}" | "]") => depth -= 1,
            Tok::Punct(",") if depth == 0 => commas += 1,
            _ => {}
        }
        j += 1;
    }
    commas + 1
}

const DECL_PREV: &[&str] = &["{", ";", "}", "(", ",", ")", "->", ":"];
const NOT_CALLS: &[&str] = &[
    "if", "while", "for", "switch", "catch", "synchronized", "return", "throw", "assert",
    "try", "do", "else", "case", "yield", "new",
];

struct BodyScanner<'a> {
    toks: &'a [Token],
    body: Body,
    /// Open-paren index of each recorded call, for chained receivers.
    open_of_call: HashMap<usize, usize>,
}

fn scan_body(toks: &[Token]) -> PResult<Body> {
    let mut s = BodyScanner {
        toks,
        body: Body::default(),
        open_of_call: HashMap::new(),
    };
    s.scan(0, toks.len())?;
    Ok(s.body)
}

impl BodyScanner<'_> {
    fn err<T>(&self, i: usize, message: &str) -> PResult<T> {
        Err(ParseError {
            line: self.toks.get(i).or(self.toks.last()).map_or(0, |t| t.line),
            message: message.into(),
        })
    }

    fn prev_is_decl_boundary(&self, i: usize) -> bool {
        if i == 0 {
            return true;
        }
        let p = &self.toks[i - 1];
        DECL_PREV.iter().any(|d| p.is(d)) || p.is_word("final") || p.ident().is_some_and(|w| w == "else")
    }

    fn scan(&mut self, from: usize, to: usize) -> PResult<()> {
        let toks = self.toks;
        let mut i = from;
        while i < to {
            let t = &toks[i];
            // annotations on locals
            if t.is("@") {
                i += 1;
                if let Some((_, j)) = body_type(toks, i) {
                    i = j;
                    if toks.get(i).is_some_and(|t| t.is("(")) {
                        i = matching(toks, i).ok_or_else(|| self.unbalanced(i))? + 1;
                    }
                }
                continue;
            }
            if t.is_word("new") {
                i = self.creation(i)?;
                continue;
            }
            if (t.is_word("class") || t.is_word("interface") || t.is_word("enum"))
                && toks.get(i + 1).and_then(|t| t.ident()).is_some()
                && (i == 0 || !toks[i - 1].is("."))
            {
                i = self.local_class(i)?;
                continue;
            }
            let Some(word) = t.ident() else {
                i += 1;
                continue;
            };
            let next_is_paren = toks.get(i + 1).is_some_and(|n| n.is("("));
            let after_dot = i > 0 && toks[i - 1].is(".");
            if next_is_paren && !NOT_CALLS.contains(&word) {
                let open = i + 1;
                let close = matching(toks, open).ok_or_else(|| self.unbalanced(open))?;
                let (kind, receiver, name) = match word {
                    "this" if !after_dot => (CallKind::ThisCtor, Receiver::This, "<init>".to_string()),
                    "super" if !after_dot => (CallKind::SuperCtor, Receiver::Super, "<init>".to_string()),
                    _ => (CallKind::Method, self.receiver(i), word.to_string()),
                };
                let idx = self.body.calls.len();
                self.body.calls.push(CallSite {
                    kind,
                    receiver,
                    name,
                    arity: arity(toks, open, close),
                    line: t.line,
                    anonymous: None,
                });
                self.open_of_call.insert(open, idx);
                i += 1;
                continue;
            }
            if word == "catch" && next_is_paren {
                // catch (A | B e)
                let open = i + 1;
                let close = matching(toks, open).ok_or_else(|| self.unbalanced(open))?;
                if close >= 2 {
                    if let (Some(name), Some((ty, _))) = (toks[close - 1].ident(), body_type(toks, open + 1)) {
                        self.body.locals.push(Param {
                            ty,
                            name: name.to_string(),
                        });
                    }
                }
                i = open + 1;
                continue;
            }
            // local declaration `T name =|;|,|:|)`
            if self.prev_is_decl_boundary(i) {
                if let Some((ty, j)) = body_type(toks, i) {
                    if let Some(name) = toks.get(j).and_then(|t| t.ident()) {
                        let follows = toks.get(j + 1);
                        if !is_keyword(name)
                            && follows.is_some_and(|f| {
                                f.is("=") || f.is(";") || f.is(",") || f.is(":") || f.is(")")
                            })
                        {
                            self.body.locals.push(Param {
                                ty,
                                name: name.to_string(),
                            });
                            i = j + 1;
                            continue;
                        }
                    }
                }
            }
            // lambda parameter `x ->`
            if toks.get(i + 1).is_some_and(|n| n.is("->")) && !is_keyword(word) {
                self.body.locals.push(Param {
                    ty: String::new(),
                    name: word.to_string(),
                });
                i += 1;
                continue;
            }
            if !is_keyword(word) {
                let explicit_this = after_dot && i >= 2 && toks[i - 2].is_word("this") && (i < 3 || !toks[i - 3].is("."));
                let method_ref = i > 0 && toks[i - 1].is("::");
                if (!after_dot || explicit_this) && !method_ref && !toks.get(i + 1).is_some_and(|n| n.is("::")) {
                    self.body.name_uses.push(NameUse {
                        name: word.to_string(),
                        line: t.line,
                        explicit_this,
                    });
                }
            }
            i += 1;
        }
        Ok(())
    }

    fn unbalanced(&self, i: usize) -> ParseError {
        ParseError {
            line: self.toks.get(i).map_or(0, |t| t.line),
            message: "unbalanced brackets in method body".into(),
        }
    }

    fn receiver(&self, i: usize) -> Receiver {
        let toks = self.toks;
        if i == 0 || !toks[i - 1].is(".") {
            return Receiver::Implicit;
        }
        if i < 2 {
            return Receiver::Unknown;
        }
        let j = i - 2;
        let t = &toks[j];
        if t.is(")") {
            let Some(open) = matching_back(toks, j) else {
                return Receiver::Unknown;
            };
            if let Some(&idx) = self.open_of_call.get(&open) {
                return Receiver::Call(idx);
            }
            // ((T) expr).m()
            if toks.get(open + 1).is_some_and(|t| t.is("(")) {
                if let Some((ty, k)) = body_type(toks, open + 2) {
                    if toks.get(k).is_some_and(|t| t.is(")")) {
                        return Receiver::Typed(ty);
                    }
                }
            }
            return Receiver::Unknown;
        }
        if t.tok == Tok::Literal {
            return Receiver::Unknown;
        }
        let Some(w) = t.ident() else {
            return Receiver::Unknown;
        };
        if w == "super" && (j == 0 || !toks[j - 1].is(".")) {
            return Receiver::Super;
        }
        let mut path = vec![w.to_string()];
        let mut k = j;
        while k >= 2 && toks[k - 1].is(".") {
            match toks[k - 2].ident() {
                Some(seg) => {
                    path.insert(0, seg.to_string());
                    k -= 2;
                }
                None => return Receiver::Unknown,
            }
        }
        if path.len() == 1 && path[0] == "this" {
            return Receiver::This;
        }
        Receiver::Path(path)
    }

    /// `new T(...)`, `new T(...) { body }` or array creation.
    fn creation(&mut self, i: usize) -> PResult<usize> {
        let toks = self.toks;
        let line = toks[i].line;
        let mut j = i + 1;
        // annotations on the created type
        while toks.get(j).is_some_and(|t| t.is("@")) {
            j = body_type(toks, j + 1).map_or(j + 1, |(_, k)| k);
        }
        let Some((ty, after)) = body_type(toks, j) else {
            return Ok(i + 1);
        };
        let Some(open_tok) = toks.get(after) else {
            return self.err(after, "unterminated object creation");
        };
        if open_tok.is("[") || open_tok.is("{") {
            // array creation: contents are scanned normally
            return Ok(after);
        }
        if !open_tok.is("(") {
            return Ok(after);
        }
        let close = matching(toks, after).ok_or_else(|| self.unbalanced(after))?;
        let idx = self.body.calls.len();
        self.body.calls.push(CallSite {
            kind: CallKind::New,
            receiver: Receiver::Implicit,
            name: ty.clone(),
            arity: arity(toks, after, close),
            line,
            anonymous: None,
        });
        self.open_of_call.insert(after, idx);
        // arguments are scanned in place
        self.scan(after + 1, close)?;
        let mut next = close + 1;
        if toks.get(next).is_some_and(|t| t.is("{")) {
            let end = matching(toks, next).ok_or_else(|| self.unbalanced(next))?;
            let decl = parse_anonymous_body(&toks[next..=end], &ty, toks[next].line)?;
            self.body.calls[idx].anonymous = Some(self.body.local_types.len());
            self.body.local_types.push(decl);
            next = end + 1;
        }
        Ok(next)
    }

    fn local_class(&mut self, i: usize) -> PResult<usize> {
        let toks = self.toks;
        let Some(open) = (i..toks.len()).find(|&k| toks[k].is("{")) else {
            return self.err(i, "local class without body");
        };
        let close = matching(toks, open).ok_or_else(|| self.unbalanced(open))?;
        let mut p = Parser {
            toks: toks[i..=close].to_vec(),
            pos: 0,
        };
        let mut decl = p.type_decl(Modifiers::default(), Vec::new())?;
        decl.local = true;
        self.body.local_types.push(decl);
        Ok(close + 1)
    }
}

fn parse_anonymous_body(toks: &[Token], super_type: &str, line: u32) -> PResult<TypeDecl> {
    let mut decl = TypeDecl {
        name: String::new(),
        kind: TypeKind::Class,
        modifiers: Modifiers::default(),
        annotations: Vec::new(),
        extends: vec![super_type.to_string()],
        implements: Vec::new(),
        fields: Vec::new(),
        methods: Vec::new(),
        nested: Vec::new(),
        start_line: line,
        end_line: line,
        local: true,
    };
    let mut p = Parser {
        toks: toks.to_vec(),
        pos: 0,
    };
    p.class_body(&mut decl)?;
    Ok(decl)
}
