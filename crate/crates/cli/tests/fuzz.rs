use gcorner_cli::{run_source, Command, Options};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;
use std::time::Instant;

const MUTATIONS: usize = 10_000;
const ALPHABET: &[u8] = b"[]{}=,\"-/.0123456789\n abqmzt";

/// Half the mutants only rewrite numbers, so they stay syntactically valid
/// and reach the library.
fn mutate(src: &str, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let mut bytes = src.as_bytes().to_vec();
    let numeric_only = rng.gen_bool(0.5);
    for _ in 0..rng.gen_range(1..=3) {
        let len = bytes.len().max(1);
        let kind = if numeric_only { 0 } else { rng.gen_range(0..7) };
        match kind {
            0 => {
                let digits: Vec<usize> = (0..bytes.len())
                    .filter(|&i| bytes[i].is_ascii_digit())
                    .collect();
                if let Some(&i) = digits.choose(rng) {
                    let n = [0i64, 1, 2, 3, 5, 7, 13, 64, 1000, -1, -4][rng.gen_range(0..11)];
                    bytes.splice(i..i + 1, n.to_string().into_bytes());
                }
            }
            1 => {
                if !bytes.is_empty() {
                    bytes.remove(rng.gen_range(0..bytes.len()));
                }
            }
            2 => bytes.insert(
                rng.gen_range(0..len),
                ALPHABET[rng.gen_range(0..ALPHABET.len())],
            ),
            3..=5 => {
                let text = String::from_utf8_lossy(&bytes).into_owned();
                let mut lines: Vec<&str> = text.lines().collect();
                if lines.is_empty() {
                    continue;
                }
                let i = rng.gen_range(0..lines.len());
                let j = rng.gen_range(0..lines.len());
                match rng.gen_range(0..3) {
                    0 => lines.insert(j, lines[i]),
                    1 => {
                        lines.remove(i);
                    }
                    _ => lines.swap(i, j),
                }
                bytes = lines.join("\n").into_bytes();
            }
            _ => {
                let i = rng.gen_range(0..len);
                if i < bytes.len() {
                    bytes[i] = rng.gen();
                }
            }
        }
    }
    bytes
}

#[test]
fn ten_thousand_mutated_fixtures_never_panic() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut sources: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .map(|p| std::fs::read_to_string(p).unwrap())
        .collect();
    sources.sort();
    assert!(sources.len() >= 5);
    let mut rng = ChaCha8Rng::seed_from_u64(0xF022);
    let mut codes = [0usize; 3];
    let start = Instant::now();
    for _ in 0..MUTATIONS {
        let src = sources.choose(&mut rng).unwrap();
        let input = mutate(src, &mut rng);
        let cmd = *Command::ALL.choose(&mut rng).unwrap();
        let mut opts = Options::default();
        match cmd {
            Command::NnCorrect => opts.order = Some(rng.gen_range(1..=4)),
            Command::Nijenhuis => opts.samples = Some(rng.gen_range(1..=2)),
            _ => {}
        }
        let out = run_source(cmd, "fuzz", &input, &opts);
        assert!(matches!(out.exit_code, 0..=2));
        assert_eq!(out.exit_code != 0, out.report.error.is_some());
        codes[out.exit_code as usize] += 1;
    }
    println!("exit codes 0/1/2: {codes:?} in {:.1?}", start.elapsed());
    assert!(codes[0] > 0 && codes[1] > 0 && codes[2] > 0);
}
