//! Text forms used on the command line: `1,2,3;4,5` for strings and blocks (1-based set
//! indices), `0.5,0.5` for flat weight lists and `0.5,0.5;0.2,0.3,0.5` for per-block weights.

use crate::error::{Error, Result};

fn groups(text: &str) -> impl Iterator<Item = &str> {
    text.split(';').map(str::trim)
}

pub fn parse_index_lists(text: &str) -> Result<Vec<Vec<usize>>> {
    groups(text)
        .enumerate()
        .map(|(g, group)| {
            if group.is_empty() {
                return Err(Error::Parse(format!("`{text}`: group {} is empty", g + 1)));
            }
            group
                .split(',')
                .map(|tok| {
                    tok.trim().parse::<usize>().map_err(|_| {
                        Error::Parse(format!(
                            "`{text}`: group {}: `{}` is not a set index",
                            g + 1,
                            tok.trim()
                        ))
                    })
                })
                .collect()
        })
        .collect()
}

pub fn parse_float_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("`{text}`: `{}` is not a number", tok.trim())))
        })
        .collect()
}

pub fn parse_float_lists(text: &str) -> Result<Vec<Vec<f64>>> {
    groups(text).map(parse_float_list).collect()
}

pub fn format_float_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn format_float_lists(values: &[Vec<f64>]) -> String {
    values
        .iter()
        .map(|v| format_float_list(v))
        .collect::<Vec<_>>()
        .join(";")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_lists() {
        assert_eq!(
            parse_index_lists("1,2,3,4,5;6,7,8,9,10").unwrap(),
            vec![vec![1, 2, 3, 4, 5], vec![6, 7, 8, 9, 10]]
        );
        assert_eq!(parse_index_lists(" 1, 2 ").unwrap(), vec![vec![1, 2]]);
        assert!(parse_index_lists("1,2;;3").is_err());
        assert!(parse_index_lists("1,x").is_err());
        assert!(parse_index_lists("1,-2").is_err());
    }

    #[test]
    fn float_lists() {
        assert_eq!(parse_float_list("0.5,0.5").unwrap(), vec![0.5, 0.5]);
        assert_eq!(
            parse_float_lists("0.5,0.5;1").unwrap(),
            vec![vec![0.5, 0.5], vec![1.0]]
        );
        assert!(parse_float_list("0.5,,0.5").is_err());
        assert_eq!(
            format_float_lists(&[vec![0.25, 0.75], vec![1.0]]),
            "0.25,0.75;1"
        );
    }
}
