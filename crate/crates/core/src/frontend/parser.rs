use std::collections::{BTreeMap, HashMap, HashSet};

use super::lexer::{tokenize, Tok, Token};
use super::{DiagCode, ParseDiagnostic, SourceSpan};
use crate::model::{
    Bsp, ConstraintSpec, CostModel, DataFormat, EdgeSpec, Flavor, FormatKind, InterconnectLink,
    KernelKind, KernelSpec, ModelError, NucleusId, PeClass, ProcessingElement, Rounding,
    Scaling, SizeSet, Subject, ViolationKind, WaveformGraph,
};

type PResult<T> = Result<T, ParseDiagnostic>;

const DEFAULT_FILE: &str = "<input>";

pub fn parse_waveform(source: &str) -> Result<WaveformGraph, Vec<ParseDiagnostic>> {
    parse_waveform_named(DEFAULT_FILE, source)
}

pub fn parse_bsp(source: &str) -> Result<Bsp, Vec<ParseDiagnostic>> {
    parse_bsp_named(DEFAULT_FILE, source)
}

pub fn parse_waveform_named(
    file: &str,
    source: &str,
) -> Result<WaveformGraph, Vec<ParseDiagnostic>> {
    let mut p = Parser::new(file, source)?;
    let result = p.waveform_file();
    p.finish(result)
}

pub fn parse_bsp_named(file: &str, source: &str) -> Result<Bsp, Vec<ParseDiagnostic>> {
    let mut p = Parser::new(file, source)?;
    let result = p.bsp_file();
    p.finish(result)
}

struct Parser<'a> {
    file: &'a str,
    toks: Vec<Token>,
    pos: usize,
    diags: Vec<ParseDiagnostic>,
}

impl<'a> Parser<'a> {
    fn new(file: &'a str, source: &str) -> Result<Self, Vec<ParseDiagnostic>> {
        let toks = tokenize(file, source).map_err(|d| vec![d])?;
        Ok(Parser {
            file,
            toks,
            pos: 0,
            diags: Vec::new(),
        })
    }

    fn finish<T>(self, result: PResult<T>) -> Result<T, Vec<ParseDiagnostic>> {
        let mut diags = self.diags;
        match result {
            Err(syntax) => {
                diags.push(syntax);
                Err(diags)
            }
            Ok(_) if diags.iter().any(|d| d.is_error()) => Err(diags),
            Ok(v) => Ok(v),
        }
    }

    // -- token plumbing ------------------------------------------------------

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn span(&self, t: &Token) -> SourceSpan {
        SourceSpan {
            file: self.file.to_string(),
            line: t.line,
            column: t.column,
            length: t.length.max(1),
        }
    }

    fn report(&mut self, code: DiagCode, at: &Token, message: String) {
        let span = self.span(at);
        self.diags.push(ParseDiagnostic::error(code, message, span));
    }

    fn syntax(&self, found: &Token, expected: &str) -> ParseDiagnostic {
        // End-of-input errors point at the last real token so the span stays
        // inside the source.
        let at = if found.tok == Tok::Eof && self.pos > 0 {
            &self.toks[self.toks.len().saturating_sub(2)]
        } else {
            found
        };
        ParseDiagnostic::error(
            DiagCode::Syntax,
            format!("expected {expected}, found {}", found.tok.describe()),
            self.span(at),
        )
    }

    fn expect(&mut self, tok: Tok) -> PResult<Token> {
        if self.peek().tok == tok {
            return Ok(self.next());
        }
        let mut err = self.syntax(self.peek(), &format!("`{}`", tok.symbol()));
        // A missing terminator belongs to the line it should have ended.
        if tok == Tok::Semi && self.pos > 0 {
            let prev = &self.toks[self.pos - 1];
            if prev.line < self.peek().line {
                err.span = self.span(prev);
                err.span.column += prev.length;
                err.span.length = 1;
            }
        }
        Err(err)
    }

    fn eat(&mut self, tok: Tok) -> bool {
        if self.peek().tok == tok {
            self.next();
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Token)> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok((s, self.next()))
            }
            _ => Err(self.syntax(self.peek(), what)),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> PResult<Token> {
        if self.at_keyword(kw) {
            Ok(self.next())
        } else {
            Err(self.syntax(self.peek(), &format!("`{kw}`")))
        }
    }

    fn string(&mut self, what: &str) -> PResult<String> {
        match &self.peek().tok {
            Tok::Str(s) => {
                let s = s.clone();
                self.next();
                Ok(s)
            }
            _ => Err(self.syntax(self.peek(), what)),
        }
    }

    /// Integer literal; overflow is reported and yields `None`.
    fn int(&mut self) -> PResult<Option<u64>> {
        match &self.peek().tok {
            Tok::Int(s) => {
                let s = s.clone();
                let t = self.next();
                match s.parse::<u64>() {
                    Ok(v) => Ok(Some(v)),
                    Err(_) => {
                        self.report(
                            DiagCode::IntegerOverflow,
                            &t,
                            format!("integer literal `{s}` does not fit in 64 bits"),
                        );
                        Ok(None)
                    }
                }
            }
            _ => Err(self.syntax(self.peek(), "an integer")),
        }
    }

    /// Nonnegative decimal number; non-finite values are reported.
    fn real(&mut self) -> PResult<Option<f64>> {
        match &self.peek().tok {
            Tok::Int(s) | Tok::Real(s) => {
                let s = s.clone();
                let t = self.next();
                match s.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(Some(v)),
                    _ => {
                        self.report(
                            DiagCode::InvalidValue,
                            &t,
                            format!("number `{s}` is out of range"),
                        );
                        Ok(None)
                    }
                }
            }
            _ => Err(self.syntax(self.peek(), "a number")),
        }
    }

    /// Number followed by a mandatory unit keyword.
    fn quantity(&mut self, unit: &str) -> PResult<Option<f64>> {
        let v = self.real()?;
        self.keyword(unit)?;
        Ok(v)
    }

    /// Identifier or string literal.
    fn tag(&mut self) -> PResult<String> {
        match &self.peek().tok {
            Tok::Ident(s) | Tok::Str(s) => {
                let s = s.clone();
                self.next();
                Ok(s)
            }
            _ => Err(self.syntax(self.peek(), "an identifier or string")),
        }
    }

    fn skip_value(&mut self) -> PResult<()> {
        let mut depth = 0usize;
        loop {
            match self.peek().tok {
                Tok::Semi if depth == 0 => return Ok(()),
                Tok::LParen | Tok::LBracket => depth += 1,
                Tok::RParen | Tok::RBracket => depth = depth.saturating_sub(1),
                Tok::RBrace | Tok::Eof => return Err(self.syntax(self.peek(), "`;`")),
                _ => {}
            }
            self.next();
        }
    }

    /// `{ key = value; ... }`. `value` parses a known key's value and
    /// returns `false` for keys it does not recognise.
    fn attributes(
        &mut self,
        what: &str,
        mut value: impl FnMut(&mut Self, &str, &Token) -> PResult<bool>,
    ) -> PResult<()> {
        self.expect(Tok::LBrace)?;
        let mut seen = HashSet::new();
        while self.peek().tok != Tok::RBrace {
            let (key, key_tok) = self.ident("an attribute name or `}`")?;
            self.expect(Tok::Eq)?;
            if !seen.insert(key.clone()) {
                self.report(
                    DiagCode::Duplicate,
                    &key_tok,
                    format!("duplicate attribute `{key}` in {what}"),
                );
                self.skip_value()?;
            } else if !value(self, &key, &key_tok)? {
                self.report(
                    DiagCode::InvalidValue,
                    &key_tok,
                    format!("unknown attribute `{key}` in {what}"),
                );
                self.skip_value()?;
            }
            self.expect(Tok::Semi)?;
        }
        self.expect(Tok::RBrace)?;
        Ok(())
    }

    fn missing(&mut self, at: &Token, attr: &str, what: &str) {
        self.report(
            DiagCode::MissingAttribute,
            at,
            format!("missing required attribute `{attr}` in {what}"),
        );
    }

    // -- shared value forms --------------------------------------------------

    fn format_literal(&mut self) -> PResult<Option<DataFormat>> {
        let (kind_name, kind_tok) = self.ident("a data format")?;
        self.expect(Tok::LParen)?;
        let mut block = None;
        let mut scaling = None;
        let mut rounding = None;
        let mut ok = true;
        while self.peek().tok != Tok::RParen {
            let (key, key_tok) = self.ident("a format argument")?;
            self.expect(Tok::Eq)?;
            match key.as_str() {
                "block" => match self.int()? {
                    Some(0) => {
                        self.report(DiagCode::InvalidValue, &key_tok, "block must be >= 1".into());
                        ok = false;
                    }
                    Some(v) => block = Some(v),
                    None => ok = false,
                },
                "scaling" => {
                    let (v, t) = self.ident("a scaling mode")?;
                    scaling = match v.as_str() {
                        "none" => Some(Scaling::None),
                        "perstage" => Some(Scaling::PerStage),
                        "block" => Some(Scaling::Block),
                        _ => {
                            self.report(
                                DiagCode::InvalidValue,
                                &t,
                                format!("unknown scaling `{v}` (expected none, perstage or block)"),
                            );
                            ok = false;
                            None
                        }
                    };
                }
                "rounding" => {
                    let (v, t) = self.ident("a rounding mode")?;
                    rounding = match v.as_str() {
                        "trunc" => Some(Rounding::Truncate),
                        "nearest" => Some(Rounding::RoundNearest),
                        _ => {
                            self.report(
                                DiagCode::InvalidValue,
                                &t,
                                format!("unknown rounding `{v}` (expected trunc or nearest)"),
                            );
                            ok = false;
                            None
                        }
                    };
                }
                _ => {
                    self.report(
                        DiagCode::InvalidValue,
                        &key_tok,
                        format!("unknown format argument `{key}`"),
                    );
                    ok = false;
                    self.next();
                }
            }
            if !self.eat(Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RParen)?;
        let Some(kind) = FormatKind::from_keyword(&kind_name) else {
            self.report(
                DiagCode::InvalidValue,
                &kind_tok,
                format!("unknown data format `{kind_name}`"),
            );
            return Ok(None);
        };
        let Some(block) = block else {
            if ok {
                self.missing(&kind_tok, "block", "data format");
            }
            return Ok(None);
        };
        if !ok {
            return Ok(None);
        }
        match DataFormat::new(kind, block, scaling.unwrap_or(Scaling::None), rounding) {
            Ok(f) => Ok(Some(f)),
            Err(ModelError::MissingRounding) => {
                self.missing(&kind_tok, "rounding", "Q-format");
                Ok(None)
            }
            Err(e) => {
                self.report(DiagCode::InvalidValue, &kind_tok, e.to_string());
                Ok(None)
            }
        }
    }

    // -- waveform dialect ----------------------------------------------------

    fn waveform_file(&mut self) -> PResult<WaveformGraph> {
        self.keyword("waveform")?;
        let name = self.string("a waveform name string")?;
        self.expect(Tok::LBrace)?;
        let mut g = WaveformGraph::new(name);
        let mut spans: HashMap<Subject, SourceSpan> = HashMap::new();
        let mut flagged: HashSet<Subject> = HashSet::new();
        loop {
            let before = self.diags.len();
            let t = self.peek().clone();
            let subject = match &t.tok {
                Tok::RBrace => break,
                Tok::Ident(kw) if kw == "kernel" => {
                    g.kernels.push(self.kernel_decl()?);
                    Subject::Kernel(g.kernels.len() - 1)
                }
                Tok::Ident(kw) if kw == "edge" => {
                    g.edges.push(self.edge_decl()?);
                    Subject::Edge(g.edges.len() - 1)
                }
                Tok::Ident(kw) if kw == "constraint" => {
                    g.constraints.push(self.constraint_decl()?);
                    Subject::Constraint(g.constraints.len() - 1)
                }
                _ => {
                    return Err(self.syntax(&t, "`kernel`, `edge`, `constraint` or `}`"));
                }
            };
            spans.insert(subject, self.span(&self.toks[self.decl_name_index(&t)]));
            if self.diags.len() > before {
                flagged.insert(subject);
            }
        }
        let close = self.expect(Tok::RBrace)?;
        if self.peek().tok != Tok::Eof {
            return Err(self.syntax(&self.peek().clone(), "end of input"));
        }

        let fallback_span = self.span(&close);
        for v in g.validate() {
            if flagged.contains(&v.subject) {
                continue;
            }
            let code = match v.kind {
                ViolationKind::DuplicateKernel => DiagCode::Duplicate,
                ViolationKind::MissingSize => DiagCode::MissingAttribute,
                ViolationKind::ZeroValue | ViolationKind::NonPositiveBound => {
                    DiagCode::InvalidValue
                }
                ViolationKind::DanglingEdge | ViolationKind::UnknownPathKernel => {
                    DiagCode::UnknownReference
                }
                ViolationKind::SelfLoop
                | ViolationKind::DuplicateEdge
                | ViolationKind::Cycle
                | ViolationKind::PathNotConnected => DiagCode::Structure,
            };
            let span = spans
                .get(&v.subject)
                .cloned()
                .unwrap_or_else(|| fallback_span.clone());
            self.diags.push(ParseDiagnostic::error(code, v.message, span));
        }
        Ok(g)
    }

    /// Index of the token naming a declaration: the identifier after the
    /// leading keyword when there is one.
    fn decl_name_index(&self, start: &Token) -> usize {
        let i = self
            .toks
            .iter()
            .position(|t| t.line == start.line && t.column == start.column)
            .unwrap_or(0);
        match self.toks.get(i + 1) {
            Some(Token {
                tok: Tok::Ident(_), ..
            }) => i + 1,
            _ => i,
        }
    }

    fn kernel_decl(&mut self) -> PResult<KernelSpec> {
        self.keyword("kernel")?;
        let (id, id_tok) = self.ident("a kernel id")?;
        self.expect(Tok::Colon)?;
        let (kind_kw, kind_tok) = self.ident("`nucleus` or `nonnucleus`")?;
        let mut invocations = None;
        match kind_kw.as_str() {
            "nucleus" => {
                self.expect(Tok::LParen)?;
                let (nucleus, _) = self.ident("a nucleus name")?;
                self.expect(Tok::RParen)?;
                let mut params = BTreeMap::new();
                let mut fallback_load = None;
                self.attributes("nucleus kernel", |p, key, _| {
                    let v = p.int()?;
                    match key {
                        "invocations" => invocations = v,
                        "fallback_load" => fallback_load = v,
                        _ => {
                            if let Some(v) = v {
                                params.insert(key.to_string(), v);
                            }
                        }
                    }
                    Ok(true)
                })?;
                Ok(KernelSpec {
                    id,
                    kind: KernelKind::Nucleus {
                        nucleus: NucleusId::new(nucleus).expect("identifiers are non-empty"),
                        params,
                        fallback_load,
                    },
                    invocations: invocations.unwrap_or(1),
                })
            }
            "nonnucleus" => {
                let mut load = None;
                self.attributes("non-nucleus kernel", |p, key, _| match key {
                    "load" => {
                        load = p.int()?;
                        Ok(true)
                    }
                    "invocations" => {
                        invocations = p.int()?;
                        Ok(true)
                    }
                    _ => Ok(false),
                })?;
                if load.is_none() {
                    self.missing(&id_tok, "load", "non-nucleus kernel");
                }
                Ok(KernelSpec {
                    id,
                    kind: KernelKind::NonNucleus {
                        load_ops: load.unwrap_or(1),
                    },
                    invocations: invocations.unwrap_or(1),
                })
            }
            _ => Err(self.syntax(&kind_tok, "`nucleus` or `nonnucleus`")),
        }
    }

    fn edge_decl(&mut self) -> PResult<EdgeSpec> {
        let kw = self.keyword("edge")?;
        let (src, _) = self.ident("a source kernel id")?;
        self.expect(Tok::Arrow)?;
        let (dst, _) = self.ident("a destination kernel id")?;
        let mut tokens = None;
        let mut had_tokens = false;
        let mut format = None;
        let mut had_format = false;
        self.attributes("edge", |p, key, _| match key {
            "tokens" => {
                had_tokens = true;
                tokens = p.int()?;
                Ok(true)
            }
            "format" => {
                had_format = true;
                format = p.format_literal()?;
                Ok(true)
            }
            _ => Ok(false),
        })?;
        if !had_tokens {
            self.missing(&kw, "tokens", "edge");
        }
        if !had_format {
            self.missing(&kw, "format", "edge");
        }
        Ok(EdgeSpec {
            src,
            dst,
            tokens: tokens.unwrap_or(1),
            format: format.unwrap_or_else(|| DataFormat::cfloat32(1)),
        })
    }

    fn constraint_decl(&mut self) -> PResult<ConstraintSpec> {
        self.keyword("constraint")?;
        let (kind, kind_tok) = self.ident("`latency` or `throughput`")?;
        let c = match kind.as_str() {
            "latency" => {
                self.expect(Tok::LParen)?;
                self.keyword("path")?;
                self.expect(Tok::Eq)?;
                self.expect(Tok::LBracket)?;
                let mut path = Vec::new();
                if self.peek().tok != Tok::RBracket {
                    loop {
                        path.push(self.ident("a kernel id")?.0);
                        if !self.eat(Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::RBracket)?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Le)?;
                let bound = self.quantity("us")?;
                ConstraintSpec::PathLatency {
                    path,
                    bound_us: bound.unwrap_or(1.0),
                }
            }
            "throughput" => {
                self.expect(Tok::Ge)?;
                let bound = self.quantity("fps")?;
                ConstraintSpec::Throughput {
                    min_frames_per_s: bound.unwrap_or(1.0),
                }
            }
            _ => return Err(self.syntax(&kind_tok, "`latency` or `throughput`")),
        };
        self.expect(Tok::Semi)?;
        Ok(c)
    }

    // -- BSP dialect ---------------------------------------------------------

    fn bsp_file(&mut self) -> PResult<Bsp> {
        self.keyword("bsp")?;
        let name = self.string("a BSP name string")?;
        self.expect(Tok::LBrace)?;
        let mut bsp = Bsp {
            name,
            ..Default::default()
        };
        let mut pe_ids: HashSet<String> = HashSet::new();
        let mut link_ids: HashSet<String> = HashSet::new();
        let mut flavor_ids: HashSet<String> = HashSet::new();
        // Links and flavors are checked against PEs once the whole file is
        // read, so declaration order does not matter.
        let mut link_refs: Vec<(Token, Token, usize)> = Vec::new();
        let mut flavor_refs: Vec<(Token, String)> = Vec::new();
        loop {
            let t = self.peek().clone();
            match &t.tok {
                Tok::RBrace => break,
                Tok::Ident(kw) if kw == "pe" => {
                    let (pe, id_tok) = self.pe_decl()?;
                    if !pe_ids.insert(pe.id.clone()) {
                        self.report(
                            DiagCode::Duplicate,
                            &id_tok,
                            format!("duplicate PE id `{}`", pe.id),
                        );
                    }
                    bsp.platform.pes.push(pe);
                }
                Tok::Ident(kw) if kw == "link" => {
                    let (link, id_tok, a_tok, b_tok) = self.link_decl()?;
                    if !link_ids.insert(link.id.clone()) {
                        self.report(
                            DiagCode::Duplicate,
                            &id_tok,
                            format!("duplicate link id `{}`", link.id),
                        );
                    }
                    if link.endpoints.0 == link.endpoints.1 {
                        self.report(
                            DiagCode::InvalidValue,
                            &b_tok,
                            format!("link `{}` connects `{}` to itself", link.id, link.endpoints.0),
                        );
                    } else if bsp
                        .platform
                        .link_between(&link.endpoints.0, &link.endpoints.1)
                        .is_some()
                    {
                        self.report(
                            DiagCode::DuplicateLink,
                            &id_tok,
                            format!(
                                "duplicate link between PE pair `{}` and `{}`",
                                link.endpoints.0, link.endpoints.1
                            ),
                        );
                    }
                    link_refs.push((a_tok, b_tok, bsp.platform.links.len()));
                    bsp.platform.links.push(link);
                }
                Tok::Ident(kw) if kw == "flavor" => {
                    let (flavor, id_tok, pe_tok) = self.flavor_decl()?;
                    if !flavor_ids.insert(flavor.id.clone()) {
                        self.report(
                            DiagCode::Duplicate,
                            &id_tok,
                            format!("duplicate flavor id `{}`", flavor.id),
                        );
                    }
                    flavor_refs.push((pe_tok, flavor.pe.clone()));
                    bsp.flavors.push(flavor);
                }
                Tok::Ident(kw) if kw == "glue" => self.glue_decl(&mut bsp)?,
                _ => return Err(self.syntax(&t, "`pe`, `link`, `flavor`, `glue` or `}`")),
            }
        }
        self.expect(Tok::RBrace)?;
        if self.peek().tok != Tok::Eof {
            return Err(self.syntax(&self.peek().clone(), "end of input"));
        }
        for (a_tok, b_tok, i) in link_refs {
            let (a, b) = bsp.platform.links[i].endpoints.clone();
            for (pe, tok) in [(a, a_tok), (b, b_tok)] {
                if !pe_ids.contains(&pe) {
                    self.report(DiagCode::UnknownPe, &tok, format!("unknown PE `{pe}` in link"));
                }
            }
        }
        for (tok, pe) in flavor_refs {
            if !pe_ids.contains(&pe) {
                self.report(
                    DiagCode::UnknownPe,
                    &tok,
                    format!("flavor references unknown PE `{pe}`"),
                );
            }
        }
        Ok(bsp)
    }

    fn positive(&mut self, at: &Token, what: &str, v: Option<f64>) -> f64 {
        match v {
            Some(x) if x > 0.0 => x,
            Some(_) => {
                self.report(DiagCode::InvalidValue, at, format!("{what} must be positive"));
                1.0
            }
            None => 1.0,
        }
    }

    fn pe_decl(&mut self) -> PResult<(ProcessingElement, Token)> {
        self.keyword("pe")?;
        let (id, id_tok) = self.ident("a PE id")?;
        self.expect(Tok::Colon)?;
        let (class_kw, class_tok) = self.ident("a PE class")?;
        let class = PeClass::from_keyword(&class_kw).unwrap_or_else(|| {
            self.report(
                DiagCode::InvalidValue,
                &class_tok,
                format!("unknown PE class `{class_kw}` (expected dsp, asip, gpp or hwacc)"),
            );
            PeClass::Gpp
        });
        let mut clock = None;
        let mut efficiency = None;
        self.attributes("pe", |p, key, t| match key {
            "clock" => {
                let v = p.quantity("MHz")?;
                clock = Some(p.positive(t, "clock", v));
                Ok(true)
            }
            "efficiency" => {
                let v = p.real()?;
                efficiency = Some(p.positive(t, "efficiency", v));
                Ok(true)
            }
            _ => Ok(false),
        })?;
        if clock.is_none() {
            self.missing(&id_tok, "clock", "pe");
        }
        Ok((
            ProcessingElement {
                id,
                class,
                clock_mhz: clock.unwrap_or(1.0),
                gpp_efficiency: efficiency.unwrap_or(1.0),
            },
            id_tok,
        ))
    }

    fn link_decl(&mut self) -> PResult<(InterconnectLink, Token, Token, Token)> {
        self.keyword("link")?;
        let (id, id_tok) = self.ident("a link id")?;
        self.expect(Tok::Colon)?;
        let (a, a_tok) = self.ident("a PE id")?;
        self.expect(Tok::BiArrow)?;
        let (b, b_tok) = self.ident("a PE id")?;
        let mut bandwidth = None;
        let mut latency = None;
        let mut energy = None;
        self.attributes("link", |p, key, t| match key {
            "bandwidth" => {
                let v = p.quantity("MBps")?;
                bandwidth = Some(p.positive(t, "bandwidth", v));
                Ok(true)
            }
            "latency" => {
                latency = Some(p.quantity("us")?.unwrap_or(0.0));
                Ok(true)
            }
            "energy_per_byte" => {
                energy = Some(p.real()?.unwrap_or(0.0));
                Ok(true)
            }
            _ => Ok(false),
        })?;
        if bandwidth.is_none() {
            self.missing(&id_tok, "bandwidth", "link");
        }
        Ok((
            InterconnectLink {
                id,
                endpoints: (a, b),
                bandwidth_mbps: bandwidth.unwrap_or(1.0),
                latency_us: latency.unwrap_or(0.0),
                energy_per_byte_j: energy.unwrap_or(0.0),
            },
            id_tok,
            a_tok,
            b_tok,
        ))
    }

    fn sizes(&mut self) -> PResult<Option<SizeSet>> {
        let open = self.expect(Tok::LBracket)?;
        if self.eat(Tok::RBracket) {
            self.report(DiagCode::InvalidValue, &open, "size set is empty".into());
            return Ok(None);
        }
        let first = self.int()?;
        if self.eat(Tok::DotDot) {
            let last = self.int()?;
            self.keyword("pow2")?;
            self.expect(Tok::RBracket)?;
            let (Some(min), Some(max)) = (first, last) else {
                return Ok(None);
            };
            if !min.is_power_of_two() || !max.is_power_of_two() || min > max {
                self.report(
                    DiagCode::InvalidValue,
                    &open,
                    format!("`[{min}..{max} pow2]` needs power-of-two bounds with min <= max"),
                );
                return Ok(None);
            }
            return Ok(Some(SizeSet::Pow2Range { min, max }));
        }
        let mut sizes = vec![first];
        while self.eat(Tok::Comma) {
            sizes.push(self.int()?);
        }
        self.expect(Tok::RBracket)?;
        let sizes: Option<Vec<u64>> = sizes.into_iter().collect();
        let Some(sizes) = sizes else { return Ok(None) };
        if sizes.contains(&0) {
            self.report(DiagCode::InvalidValue, &open, "sizes must be >= 1".into());
            return Ok(None);
        }
        Ok(Some(SizeSet::List { sizes }))
    }

    /// `c0 + c1*n + c2*nlogn` with any subset of terms in any order.
    fn cost_expr(&mut self, allowed: &[&str]) -> PResult<Option<Vec<f64>>> {
        let mut coeffs = vec![None; allowed.len() + 1];
        let mut ok = true;
        loop {
            let at = self.peek().clone();
            let c = self.real()?;
            let slot = if self.eat(Tok::Star) {
                let (var, var_tok) = self.ident("`n` or `nlogn`")?;
                match allowed.iter().position(|a| *a == var) {
                    Some(i) => i + 1,
                    None => {
                        self.report(
                            DiagCode::InvalidValue,
                            &var_tok,
                            format!("unknown cost variable `{var}`"),
                        );
                        ok = false;
                        continue;
                    }
                }
            } else {
                0
            };
            if coeffs[slot].is_some() {
                self.report(DiagCode::Duplicate, &at, "repeated term in cost expression".into());
                ok = false;
            }
            coeffs[slot] = Some(c.unwrap_or(0.0));
            if c.is_none() {
                ok = false;
            }
            if !self.eat(Tok::Plus) {
                break;
            }
        }
        Ok(ok.then(|| coeffs.into_iter().map(|c| c.unwrap_or(0.0)).collect()))
    }

    fn flavor_decl(&mut self) -> PResult<(Flavor, Token, Token)> {
        self.keyword("flavor")?;
        let (id, id_tok) = self.ident("a flavor id")?;
        self.expect(Tok::Colon)?;
        let (nucleus, _) = self.ident("a nucleus name")?;
        self.keyword("on")?;
        let (pe, pe_tok) = self.ident("a PE id")?;
        let mut algorithm = None;
        let mut vendor = None;
        let mut sizes = None;
        let mut input = None;
        let mut output = None;
        let mut cycles = None;
        let mut energy = None;
        let mut seen_invalid = false;
        self.attributes("flavor", |p, key, _| {
            match key {
                "algorithm" => algorithm = Some(p.tag()?),
                "vendor" => vendor = Some(p.tag()?),
                "sizes" => {
                    sizes = Some(p.sizes()?);
                }
                "input" => input = Some(p.format_literal()?),
                "output" => output = Some(p.format_literal()?),
                "cycles" => cycles = Some(p.cost_expr(&["n", "nlogn"])?),
                "energy" => energy = Some(p.cost_expr(&["n"])?),
                _ => return Ok(false),
            }
            Ok(true)
        })?;
        for (present, name) in [
            (algorithm.is_some(), "algorithm"),
            (sizes.is_some(), "sizes"),
            (input.is_some(), "input"),
            (output.is_some(), "output"),
            (cycles.is_some(), "cycles"),
        ] {
            if !present {
                self.missing(&id_tok, name, "flavor");
                seen_invalid = true;
            }
        }
        let cycles = cycles.flatten().unwrap_or_else(|| vec![1.0, 0.0, 0.0]);
        let energy = energy.flatten().unwrap_or_else(|| vec![0.0, 0.0]);
        let _ = seen_invalid;
        Ok((
            Flavor {
                id,
                nucleus: NucleusId::new(nucleus).expect("identifiers are non-empty"),
                pe,
                algorithm: algorithm.unwrap_or_default(),
                vendor: vendor.unwrap_or_default(),
                supported_sizes: sizes.flatten().unwrap_or(SizeSet::List { sizes: vec![1] }),
                input_format: input.flatten().unwrap_or_else(|| DataFormat::cfloat32(1)),
                output_format: output.flatten().unwrap_or_else(|| DataFormat::cfloat32(1)),
                cost: CostModel {
                    a: cycles[0],
                    b: cycles[1],
                    c: cycles[2],
                    e0: energy[0],
                    e1: energy[1],
                },
            },
            id_tok,
            pe_tok,
        ))
    }

    fn glue_decl(&mut self, bsp: &mut Bsp) -> PResult<()> {
        let kw = self.keyword("glue")?;
        let kind = |p: &mut Self| -> PResult<Option<FormatKind>> {
            let (name, t) = p.ident("a format kind")?;
            let k = FormatKind::from_keyword(&name);
            if k.is_none() {
                p.report(DiagCode::InvalidValue, &t, format!("unknown data format `{name}`"));
            }
            Ok(k)
        };
        let from = kind(self)?;
        self.expect(Tok::Arrow)?;
        let to = kind(self)?;
        self.expect(Tok::Eq)?;
        let rule = if self.at_keyword("none") {
            self.next();
            Some(None)
        } else {
            let at = self.peek().clone();
            match self.int()? {
                Some(0) => {
                    self.report(
                        DiagCode::InvalidValue,
                        &at,
                        "glue cost must be >= 1 cycle per sample".into(),
                    );
                    None
                }
                Some(v) => Some(Some(v)),
                None => None,
            }
        };
        self.expect(Tok::Semi)?;
        if let (Some(from), Some(to), Some(rule)) = (from, to, rule) {
            if bsp.glue.overrides.insert((from, to), rule).is_some() {
                self.report(
                    DiagCode::Duplicate,
                    &kw,
                    format!("duplicate glue rule {from} -> {to}"),
                );
            }
        }
        Ok(())
    }
}
