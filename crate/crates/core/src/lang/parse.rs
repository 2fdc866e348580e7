use super::{ArithOp, BExpr, CmpOp, Expr, LangError, Program};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Assign,
    Semi,
    Choice,
    Star,
    LParen,
    RParen,
    At,
    Cmp(CmpOp),
    Plus,
    Minus,
    Slash,
    Percent,
    AndAnd,
    OrOr,
    Bang,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Assign => "`:=`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Choice => "`[]`".into(),
            Tok::Star => "`*`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::At => "`@`".into(),
            Tok::Cmp(op) => format!("`{op}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Percent => "`%`".into(),
            Tok::AndAnd => "`&&`".into(),
            Tok::OrOr => "`||`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

const KEYWORDS: &[&str] = &[
    "skip", "diverge", "assume", "if", "then", "else", "fi", "while", "do", "od", "true", "false",
    "not", "and", "or",
];

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> LangError {
    LangError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Spanned>, LangError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let mut bump = |n: usize, i: &mut usize| {
            *i += n;
            col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            bump(1, &mut i);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let next = chars.get(i + 1).copied();
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            bump(j - i, &mut i);
            Tok::Ident(word)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[i..j].iter().collect();
            let n = digits
                .parse()
                .map_err(|_| syntax(start_line, start_col, "integer literal too large"))?;
            bump(j - i, &mut i);
            Tok::Int(n)
        } else {
            let (tok, len) = match (c, next) {
                (':', Some('=')) => (Tok::Assign, 2),
                ('[', Some(']')) => (Tok::Choice, 2),
                ('&', Some('&')) => (Tok::AndAnd, 2),
                ('|', Some('|')) => (Tok::OrOr, 2),
                ('!', Some('=')) => (Tok::Cmp(CmpOp::Ne), 2),
                ('<', Some('=')) => (Tok::Cmp(CmpOp::Le), 2),
                ('>', Some('=')) => (Tok::Cmp(CmpOp::Ge), 2),
                ('=', Some('=')) => (Tok::Cmp(CmpOp::Eq), 2),
                ('=', _) => (Tok::Cmp(CmpOp::Eq), 1),
                ('<', _) => (Tok::Cmp(CmpOp::Lt), 1),
                ('>', _) => (Tok::Cmp(CmpOp::Gt), 1),
                ('!', _) => (Tok::Bang, 1),
                (';', _) => (Tok::Semi, 1),
                ('*', _) => (Tok::Star, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('@', _) => (Tok::At, 1),
                ('+', _) => (Tok::Plus, 1),
                ('-', _) => (Tok::Minus, 1),
                ('/', _) => (Tok::Slash, 1),
                ('%', _) => (Tok::Percent, 1),
                _ => return Err(syntax(line, col, format!("unexpected character `{c}`"))),
            };
            bump(len, &mut i);
            tok
        };
        out.push(Spanned {
            tok,
            line: start_line,
            column: start_col,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = Result<T, LangError>;

impl Parser {
    fn new(text: &str) -> PResult<Self> {
        Ok(Self {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> LangError {
        let t = &self.toks[self.pos];
        syntax(t.line, t.column, message)
    }

    fn unexpected(&self, wanted: &str) -> LangError {
        self.error(format!(
            "expected {wanted}, found {}",
            self.peek().describe()
        ))
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(w) if w == kw)
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Tok::Ident(w) if !KEYWORDS.contains(&w.as_str()) => {
                let w = w.clone();
                self.advance();
                Ok(w)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn finish(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn program(&mut self) -> PResult<Program> {
        let mut p = self.seq()?;
        while *self.peek() == Tok::Choice {
            self.advance();
            p = Program::choice(p, self.seq()?);
        }
        Ok(p)
    }

    fn seq(&mut self) -> PResult<Program> {
        let mut p = self.post()?;
        while *self.peek() == Tok::Semi {
            self.advance();
            p = Program::seq(p, self.post()?);
        }
        Ok(p)
    }

    fn post(&mut self) -> PResult<Program> {
        let mut p = self.atom()?;
        while *self.peek() == Tok::Star {
            self.advance();
            p = Program::star(p);
        }
        Ok(p)
    }

    fn atom(&mut self) -> PResult<Program> {
        if self.eat_keyword("skip") {
            return Ok(Program::Skip);
        }
        if self.eat_keyword("diverge") {
            return Ok(Program::Diverge);
        }
        if self.eat_keyword("assume") {
            self.expect(Tok::LParen)?;
            let b = self.bexpr()?;
            self.expect(Tok::RParen)?;
            return Ok(Program::Assume(b));
        }
        if self.eat_keyword("if") {
            let g = self.bexpr()?;
            self.expect_keyword("then")?;
            let a = self.program()?;
            self.expect_keyword("else")?;
            let b = self.program()?;
            self.expect_keyword("fi")?;
            return Ok(Program::If(g, Box::new(a), Box::new(b)));
        }
        if self.eat_keyword("while") {
            let g = self.bexpr()?;
            self.expect_keyword("do")?;
            let body = self.program()?;
            self.expect_keyword("od")?;
            return Ok(Program::While(g, Box::new(body)));
        }
        match self.peek() {
            Tok::LParen => {
                self.advance();
                let p = self.program()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            Tok::At => {
                self.advance();
                Ok(Program::Ref(self.ident()?))
            }
            Tok::Ident(_) => {
                let x = self.ident()?;
                self.expect(Tok::Assign)?;
                Ok(Program::Assign(x, self.expr()?))
            }
            _ => Err(self.unexpected("a program")),
        }
    }

    fn bexpr(&mut self) -> PResult<BExpr> {
        let mut b = self.conj()?;
        while *self.peek() == Tok::OrOr || self.is_keyword("or") {
            self.advance();
            b = BExpr::Or(Box::new(b), Box::new(self.conj()?));
        }
        Ok(b)
    }

    fn conj(&mut self) -> PResult<BExpr> {
        let mut b = self.neg()?;
        while *self.peek() == Tok::AndAnd || self.is_keyword("and") {
            self.advance();
            b = BExpr::And(Box::new(b), Box::new(self.neg()?));
        }
        Ok(b)
    }

    fn neg(&mut self) -> PResult<BExpr> {
        if *self.peek() == Tok::Bang || self.is_keyword("not") {
            self.advance();
            return Ok(BExpr::Not(Box::new(self.neg()?)));
        }
        self.bprimary()
    }

    fn bprimary(&mut self) -> PResult<BExpr> {
        if self.eat_keyword("true") {
            return Ok(BExpr::True);
        }
        if self.eat_keyword("false") {
            return Ok(BExpr::False);
        }
        if *self.peek() != Tok::LParen {
            return self.comparison();
        }
        // `(` opens either an arithmetic operand or a nested boolean.
        let start = self.pos;
        let as_cmp = self.comparison();
        if as_cmp.is_ok() {
            return as_cmp;
        }
        let cmp_reached = self.pos;
        self.pos = start;
        self.advance();
        let nested = self.bexpr().and_then(|b| {
            self.expect(Tok::RParen)?;
            Ok(b)
        });
        match nested {
            Ok(b) => Ok(b),
            Err(e) if self.pos >= cmp_reached => Err(e),
            Err(_) => {
                self.pos = start;
                self.comparison()
            }
        }
    }

    fn comparison(&mut self) -> PResult<BExpr> {
        let lhs = self.expr()?;
        let op = match self.peek() {
            Tok::Cmp(op) => *op,
            _ => return Err(self.unexpected("a comparison operator")),
        };
        self.advance();
        let rhs = self.expr()?;
        Ok(BExpr::Cmp(op, lhs, rhs))
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut e = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok(e),
            };
            self.advance();
            e = Expr::Arith(op, Box::new(e), Box::new(self.term()?));
        }
    }

    fn starts_expr(tok: &Tok) -> bool {
        matches!(tok, Tok::Ident(_) | Tok::Int(_) | Tok::LParen | Tok::Minus)
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut e = self.unary()?;
        loop {
            let op = match self.peek() {
                // A `*` not followed by an operand is the postfix program star.
                Tok::Star if Self::starts_expr(self.peek_at(1)) => ArithOp::Mul,
                Tok::Slash => ArithOp::Div,
                Tok::Percent => ArithOp::Mod,
                _ => return Ok(e),
            };
            self.advance();
            e = Expr::Arith(op, Box::new(e), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if *self.peek() == Tok::Minus {
            self.advance();
            return Ok(match self.unary()? {
                Expr::Int(n) => Expr::Int(-n),
                e => Expr::Neg(Box::new(e)),
            });
        }
        match self.peek().clone() {
            Tok::Int(n) => {
                self.advance();
                Ok(Expr::Int(n))
            }
            Tok::LParen => {
                self.advance();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(_) => Ok(Expr::Name(self.ident()?)),
            _ => Err(self.unexpected("an expression")),
        }
    }
}

pub fn parse_program(text: &str) -> Result<Program, LangError> {
    let mut p = Parser::new(text)?;
    let prog = p.program()?;
    p.finish()?;
    Ok(prog)
}

pub fn parse_bexpr(text: &str) -> Result<BExpr, LangError> {
    let mut p = Parser::new(text)?;
    let b = p.bexpr()?;
    p.finish()?;
    Ok(b)
}

pub fn parse_expr(text: &str) -> Result<Expr, LangError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}
