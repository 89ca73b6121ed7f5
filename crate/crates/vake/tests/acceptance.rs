//! Acceptance run: one PASS or FAIL line per criterion, at full size.
//! Exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use vake::runner::{run_file, run_parallel, Mode};
use vake::scenario_file::{table1, ScenarioFile};
use vake::{run_cli, vectors};
use vake_core::adversary::{grind_sas, AdversaryAction, Scenario, ScenarioConfig, When};
use vake_core::cards::CardStore;
use vake_core::channel::ChannelConfig;
use vake_core::crypto::{Ciphertext, Concrete, Digest, PublicShare, RandomNonce, Suite};
use vake_core::protocol::{
    decode_frame, encode_frame, AbortCode, Event, Message, Phase, Session, SessionConfig, UserId, R_MAX,
};
use vake_core::sas::WordList;
use vake_core::sim::{Duplex, Endpoint, Passive};
use vake_core::term::{derivable, Term, DEFAULT_DEPTH_BOUND};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn secs(d: Duration) -> String {
    format!("{:.1} s", d.as_secs_f64())
}

fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(std::iter::once("vake").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap() + &String::from_utf8(err).unwrap())
}

const TABLE1: &str = "\
property             (a)   (b)   (c)   (d)
session key secrecy  yes   yes   yes   no
forward secrecy      yes   yes   yes   no
injective agreement  yes   yes   yes   no
";

fn table1_reproduction() -> Outcome {
    let start = Instant::now();
    let (code, out) = cli(&["run", "--scenario", "table1", "--mode", "symbolic"]);
    let took = start.elapsed();
    let trials = out.lines().filter(|l| l.starts_with("trial ")).count();
    let matrix = out.contains(TABLE1);
    let collisions = out.matches("sas collision yes").count();
    outcome(
        code == 0 && matrix && trials == 400 && took < Duration::from_secs(60),
        format!(
            "exit {code}, matrix exact {matrix}, {trials} trials in {} (limit 60 s), {collisions} chance SAS collisions",
            secs(took)
        ),
    )
}

fn mitm_detection() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for s in Scenario::ALL {
        let mut cfg = ScenarioConfig::new(s).with_script(vec![AdversaryAction::MitmDh]);
        cfg.trials = 1000;
        cfg.seed = 2024;
        let r = run_parallel(&Concrete, &cfg).unwrap();
        // Trials whose two SAS coincide by chance are screened out.
        let screened: Vec<_> = r.trials.iter().filter(|t| !t.sas_collision).collect();
        let good = screened
            .iter()
            .filter(|t| match s {
                Scenario::D => t.completed && t.exposed == [true, true],
                _ => {
                    !t.completed
                        && matches!(t.detected_by, Some(AbortCode::SigInvalid) | Some(AbortCode::SasMismatch))
                }
            })
            .count();
        pass &= good == screened.len() && screened.len() + 3 >= 1000;
        lines.push(format!("({}) {good}/{}", s.letter(), screened.len()));
    }
    outcome(pass, lines.join(", "))
}

fn grinding() -> Outcome {
    const N: u32 = 100_000;
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [1u32, 16] {
        let r = grind_sas(n, N, 0x5a5 + u64::from(n), false);
        let p = f64::from(n) / 65536.0;
        let mean = f64::from(N) * p;
        let sd = (mean * (1.0 - p)).sqrt();
        let ok = (f64::from(r.successes) - mean).abs() <= 3.0 * sd;
        pass &= ok;
        parts.push(format!("n={n}: {} hits, expected {mean:.2} +- {:.2}", r.successes, 3.0 * sd));
    }
    let committed = grind_sas(16, N, 0x5a5 + 16, true);
    pass &= committed.successes == 0;
    parts.push(format!("n=16 committed: {} hits", committed.successes));
    let took = start.elapsed();
    pass &= took < Duration::from_secs(300);
    outcome(pass, format!("{} over {N} trials each, {} (limit 300 s)", parts.join("; "), secs(took)))
}

fn honest_pair(seed: u64, channel: ChannelConfig) -> Duplex<Concrete> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let ids = [UserId::from_name("alice"), UserId::from_name("bob")];
    let keys = [Concrete.gen_signing_keypair(&mut rng), Concrete.gen_signing_keypair(&mut rng)];
    let [a, b] = [0, 1].map(|i| {
        let mut cards = CardStore::new();
        cards.install(ids[1 - i], keys[1 - i].1);
        let cfg = SessionConfig::new(ids[i], Some(keys[i].0.clone()));
        Endpoint::new(Session::new(Concrete, cfg, ChaCha20Rng::from_rng(&mut rng).unwrap()), cards)
    });
    let mut d = Duplex::new(a, b, channel);
    d.input(0, Event::Start, &mut Passive);
    d.input(1, Event::Start, &mut Passive);
    d.run(&mut Passive, 10_000_000);
    d
}

fn desync_robustness() -> Outcome {
    const TRIALS: u64 = 10_000;
    // Bit error rate at which the longest frame is corrupted with
    // probability 0.2; shorter frames fare better.
    let longest = honest_pair(0, ChannelConfig::lossless(0)).wire.iter().map(|w| w.bytes.len()).max().unwrap();
    let ber = 1.0 - 0.8f64.powf(1.0 / (8 * longest) as f64);
    let mut completed = 0;
    let mut agree = 0;
    for seed in 0..TRIALS {
        let channel = ChannelConfig { drop_prob: 0.2, bit_error_rate: ber, ..ChannelConfig::lossless(seed) };
        let d = honest_pair(seed + 1, channel);
        let (a, b) = (&d.ends[0].session, &d.ends[1].session);
        if a.phase() == Phase::Secured && b.phase() == Phase::Secured {
            completed += 1;
            if a.session_key().map(|k| k.0) == b.session_key().map(|k| k.0) && a.sas() == b.sas() {
                agree += 1;
            }
        }
    }
    let rate = completed as f64 / TRIALS as f64;
    outcome(
        rate >= 0.99 && agree == completed,
        format!(
            "{completed}/{TRIALS} completed ({:.2}%, need 99%) at drop 0.2, bit error rate {ber:.3e} over {longest}-byte frames, R_max {R_MAX}; {agree} with identical key and SAS",
            rate * 100.0
        ),
    )
}

fn identity_protection() -> Outcome {
    use AdversaryAction::*;
    let scripts = [
        vec![MitmDh, StealSigningKey(When::After)],
        vec![MitmDh, StripSignature],
        vec![MitmDh, StealSigningKey(When::Before)],
        vec![Drop(1), Replay(0), Replay(3), ModifyBits(4, vec![0, 0, 0, 0, 0, 0, 0, 0, 1])],
        vec![],
    ];
    let mut file = ScenarioFile { name: "ids".into(), scenarios: Vec::new() };
    for (i, script) in scripts.iter().enumerate() {
        for s in Scenario::ALL {
            let mut cfg = ScenarioConfig::new(s).with_script(script.clone());
            cfg.trials = 25;
            cfg.seed = i as u64;
            file.scenarios.push(cfg);
        }
    }
    let reports = run_file(&file, Mode::Both).unwrap();
    let traces: usize = reports.iter().map(|r| r.trials.len()).sum();
    let leaks: usize = reports.iter().flat_map(|r| &r.trials).filter(|t| t.identity_leak).count();
    outcome(leaks == 0, format!("{leaks} leaks over {traces} traces (cleartext scan in both modes, eavesdropper closure in symbolic)"))
}

fn closure_soundness() -> Outcome {
    let text = include_str!("../../core/tests/data/closure_suite.txt");
    let mut total = 0;
    let mut wrong = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        total += 1;
        let parts: Vec<&str> = line.split('|').map(str::trim).collect();
        let goal = Term::parse_sexpr(parts[1]).unwrap();
        let k = parts[2].split(';').map(str::trim).filter(|s| !s.is_empty()).map(|s| Term::parse_sexpr(s).unwrap()).collect();
        if derivable(&goal, &k, DEFAULT_DEPTH_BOUND) != (parts[0] == "+") {
            wrong.push(i + 1);
        }
    }
    // The two named cases, stated directly.
    let a = Term::atom("a");
    let b = Term::atom("b");
    let shares = [Term::exp(a.clone()), Term::exp(b.clone())].into_iter().collect();
    let cdh = !derivable(&Term::dh(a.clone(), Term::exp(b.clone())), &shares, DEFAULT_DEPTH_BOUND);
    let leaked = [Term::exp(a.clone()), Term::exp(b.clone()), Term::atom("sk_alice"), Term::atom("sk_bob")]
        .into_iter()
        .collect();
    let key = Term::kdf("sess", Term::dh(a, Term::exp(b)), Term::data(vec![7]));
    let pcs = !derivable(&key, &leaked, DEFAULT_DEPTH_BOUND);
    outcome(
        wrong.is_empty() && total >= 30 && cdh && pcs,
        format!("{}/{total} rule cases, shares do not give dh {cdh}, kdf safe after key leak {pcs}", total - wrong.len()),
    )
}

fn random_message(rng: &mut ChaCha20Rng) -> Message<Concrete> {
    let mut arr32 = || {
        let mut b = [0u8; 32];
        rng.fill_bytes(&mut b);
        b
    };
    let (x, y) = (arr32(), arr32());
    let mut salt = [0u8; 16];
    rng.fill_bytes(&mut salt);
    let mut ct = vec![0u8; rng.gen_range(16..200)];
    rng.fill_bytes(&mut ct);
    match rng.gen_range(0..8) {
        0 => Message::RoleNonce { r: rng.gen() },
        1 => Message::Commit { c: Digest(x) },
        2 => Message::KeyShareR { share: PublicShare(x), salt: RandomNonce(salt) },
        3 => Message::KeyShareI { share: PublicShare(y), salt: RandomNonce(salt) },
        4 => Message::EncIdI { ct: Ciphertext(ct) },
        5 => Message::EncIdR { ct: Ciphertext(ct) },
        6 => Message::SasCtl { ct: Ciphertext(ct) },
        _ => Message::Abort { code: AbortCode::from_byte(rng.gen_range(1..=6)).unwrap() },
    }
}

fn codec_conformance() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let mut mismatches = 0;
    for _ in 0..100_000 {
        let m = random_message(&mut rng);
        let (sid, rc) = (rng.gen::<u32>(), rng.gen::<u8>());
        match decode_frame::<Concrete>(&encode_frame(&m, sid, rc)) {
            Ok(f) if f.message == m && f.session_id == sid && f.retransmit_count == rc => {}
            _ => mismatches += 1,
        }
    }
    let mut flips = 0;
    let mut accepted = 0;
    for (_, m) in vectors::codec_messages() {
        let frame = encode_frame(&m, vectors::CODEC_SESSION_ID, 0);
        for bit in 0..frame.len() * 8 {
            let mut f = frame.clone();
            f[bit / 8] ^= 1 << (bit % 8);
            flips += 1;
            accepted += usize::from(decode_frame::<Concrete>(&f).is_ok());
        }
    }
    let golden = golden_vectors_match();
    outcome(
        mismatches == 0 && accepted == 0 && golden.is_empty(),
        format!(
            "{mismatches} round-trip mismatches in 100000 frames, {accepted}/{flips} single-bit corruptions accepted, golden files {}",
            if golden.is_empty() { "match".to_string() } else { format!("differ: {}", golden.join(" ")) }
        ),
    )
}

/// Emits the vector files and checks each against its oracle. Returns the
/// names of files that disagree.
fn golden_vectors_match() -> Vec<&'static str> {
    use common::{crc16, frame, hkdf32, reference_payloads, unhex};
    let dir = tempfile::tempdir().unwrap();
    vectors::emit(dir.path(), &WordList::default()).unwrap();
    let read = |n: &str| std::fs::read_to_string(dir.path().join(n)).unwrap();
    let mut bad = Vec::new();
    let kdf = read("kdf.txt");
    if kdf.lines().count() != 15
        || !kdf.lines().all(|l| {
            let p: Vec<&str> = l.split(' ').collect();
            hex::encode(hkdf32(&unhex(p[1]), &unhex(p[0]), p[2].as_bytes())) == p[3]
        })
    {
        bad.push("kdf.txt");
    }
    let crc = read("crc.txt");
    if !crc.lines().any(|l| l == "313233343536373839 29b1")
        || !crc.lines().all(|l| {
            let (i, c) = l.split_once(' ').unwrap();
            format!("{:04x}", crc16(&unhex(i))) == c
        })
    {
        bad.push("crc.txt");
    }
    let codec = read("codec.txt");
    let expect: String = reference_payloads()
        .into_iter()
        .enumerate()
        .map(|(rc, (name, tag, payload))| {
            format!("{name} deadbeef {rc} {}\n", hex::encode(frame(tag, 0xdead_beef, rc as u8, &payload)))
        })
        .collect();
    if codec != expect {
        bad.push("codec.txt");
    }
    let digits = read("sas_digits.txt");
    let expect: String = (0..65536u32).map(|v| format!("{v:04x} {v:05}\n")).collect();
    if digits != expect {
        bad.push("sas_digits.txt");
    }
    if read("sas_words.txt").lines().count() != 65536 {
        bad.push("sas_words.txt");
    }
    bad
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let lossy = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/lossy.json");
    let mut same = Vec::new();
    for (name, args) in [
        ("table1", vec!["--scenario", "table1", "--mode", "both", "--trials", "20"]),
        ("lossy", vec!["--scenario", lossy, "--mode", "both"]),
    ] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let path = dir.path().join(format!("{name}-{run}.txt"));
            let mut argv = vec!["run"];
            argv.extend(&args);
            let p = path.to_str().unwrap().to_string();
            argv.extend(["--out", &p]);
            cli(&argv);
            outputs.push(std::fs::read(&path).unwrap());
        }
        same.push((name, outputs[0] == outputs[1] && !outputs[0].is_empty()));
    }
    let grind = [grind_sas(16, 2000, 3, false), grind_sas(16, 2000, 3, false)];
    let grind_same = grind[0] == grind[1];
    let all = same.iter().all(|s| s.1) && grind_same && table1() == table1();
    outcome(
        all,
        format!(
            "{}, grinding {grind_same}",
            same.iter().map(|(n, s)| format!("{n} report identical {s}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("table 1 reproduction (symbolic)", table1_reproduction),
        ("MITM detection (concrete, 1000 trials)", mitm_detection),
        ("SAS grinding statistics", grinding),
        ("desync robustness", desync_robustness),
        ("identity protection", identity_protection),
        ("knowledge-closure soundness", closure_soundness),
        ("codec and KDF conformance", codec_conformance),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        failed += usize::from(!o.pass);
        println!(
            "{} {}. {name}: {} [{}]",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            secs(start.elapsed())
        );
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
