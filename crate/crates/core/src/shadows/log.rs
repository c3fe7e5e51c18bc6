//! Plain-text sample records: one shot per line, fields separated by `;`.
//!
//! Matchgate shots are `perm;signs;bits` (for example `1,0,3,2;+-++;01`) and
//! Pauli shots are `perm;bases;bits` (for example `1,0;+X-Z;01`).

use super::perm::SignedPermutation;
use crate::error::{Error, Result};
use crate::pauli::Pauli;
use crate::qubit::{PauliFrame, SignedPauli};

fn bits_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::invalid(format!("bad bit '{c}'"))),
        })
        .collect()
}

fn parse_perm(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Error::invalid(format!("bad index '{t}'"))))
        .collect()
}

fn split3(line: &str) -> Result<(&str, &str, &str)> {
    let mut it = line.trim().split(';');
    match (it.next(), it.next(), it.next(), it.next()) {
        (Some(a), Some(b), Some(c), None) => Ok((a, b, c)),
        _ => Err(Error::invalid(format!("record '{line}' must have three ';'-separated fields"))),
    }
}

pub fn format_matchgate(q: &SignedPermutation, bits: &[u8]) -> String {
    format!("{};{}", q, bits_string(bits))
}

pub fn parse_matchgate(line: &str) -> Result<(SignedPermutation, Vec<u8>)> {
    let (perm, signs, bits) = split3(line)?;
    let signs = signs
        .chars()
        .map(|c| match c {
            '+' => Ok(1),
            '-' => Ok(-1),
            _ => Err(Error::invalid(format!("bad sign '{c}'"))),
        })
        .collect::<Result<Vec<i8>>>()?;
    let q = SignedPermutation::new(parse_perm(perm)?, signs)?;
    let bits = parse_bits(bits)?;
    if 2 * bits.len() != q.dim() {
        return Err(Error::invalid("bitstring length must be half the permutation size"));
    }
    Ok((q, bits))
}

pub fn format_pauli(frame: &PauliFrame, bits: &[u8]) -> String {
    let perm: Vec<String> = frame.perm.iter().map(|p| p.to_string()).collect();
    let bases: String = frame.bases.iter().map(|b| b.label()).collect();
    format!("{};{};{}", perm.join(","), bases, bits_string(bits))
}

pub fn parse_pauli(line: &str) -> Result<(PauliFrame, Vec<u8>)> {
    let (perm, bases, bits) = split3(line)?;
    let perm = parse_perm(perm)?;
    let chars: Vec<char> = bases.chars().collect();
    if !chars.len().is_multiple_of(2) {
        return Err(Error::invalid("bases must be sign/axis pairs"));
    }
    let bases = chars
        .chunks(2)
        .map(|pair| {
            let negative = match pair[0] {
                '+' => false,
                '-' => true,
                c => return Err(Error::invalid(format!("bad sign '{c}'"))),
            };
            let axis = Pauli::from_char(pair[1])
                .filter(|&p| p != Pauli::I)
                .ok_or_else(|| Error::invalid(format!("bad axis '{}'", pair[1])))?;
            Ok(SignedPauli { negative, axis })
        })
        .collect::<Result<Vec<_>>>()?;
    let bits = parse_bits(bits)?;
    let n = bits.len();
    let mut sorted = perm.clone();
    sorted.sort_unstable();
    if perm.len() != n || bases.len() != n || sorted != (0..n).collect::<Vec<_>>() {
        return Err(Error::invalid("frame and bits must both cover n qubits"));
    }
    Ok((PauliFrame { perm, bases }, bits))
}
