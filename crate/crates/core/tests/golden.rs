//! Command transcripts for the small itemAt and polymorphic specifications,
//! with elapsed times masked.

mod common;

use common::{example, mask_times, spec_path};
use spec_qc::cli::{run_batch_mode, Session, ToolConfig, EXIT_FAILED, EXIT_LOAD_ERROR, EXIT_OK};

fn transcript(spec: &str, input: &str) -> String {
    let mut session = Session::new(example(spec), ToolConfig::default());
    let mut out = Vec::new();
    session.run_repl(input.as_bytes(), &mut out).unwrap();
    mask_times(&String::from_utf8(out).unwrap())
}

#[test]
fn item_at_fails_and_reruns() {
    let got = transcript("item_at.vdmsl", "pog\nqc\nqr 1\n");
    let want = "\
> Generated 1 proof obligation:

Proof Obligation 1: (Unproved)
itemAt: sequence apply obligation in test.vdmsl at line 3:28
(forall list:seq of nat, index:nat &
  index in set inds list)
> PO #1, FAILED in <t>s: Counterexample: index = 0, list = []
----
itemAt: sequence apply obligation in test.vdmsl at line 3:28
(forall list:seq of nat, index:nat &
  index in set inds list)

> => print itemAt([], 0)
Error 4064: Value 0 is not a nat1 in test.vdmsl at line 3:28
3:      itemAt(list, index) == list(index)
> \n";
    assert_eq!(got, want);
}

#[test]
fn precondition_gives_maybe() {
    let got = transcript("item_at_pre.vdmsl", "pog\nqc\n");
    let want = "\
> Generated 1 proof obligation:

Proof Obligation 1: (Unproved)
itemAt: sequence apply obligation in test.vdmsl at line 3:28
(forall list:seq of nat, index:nat &
    pre_itemAt(list, index) => index in set inds list)
> PO #1, MAYBE in <t>s
> \n";
    assert_eq!(got, want);
}

#[test]
fn explicit_test_is_trivial() {
    let got = transcript("item_at_if.vdmsl", "pog\nqc\n");
    let want = "\
> Generated 1 proof obligation:

Proof Obligation 1: (Unproved)
itemAt: sequence apply obligation in test.vdmsl at line 5:14
(forall list:seq of nat, index:nat &
  ((index in set (inds list)) => index in set inds list))
> PO #1, PROVABLE by trivial index in set (inds list) in <t>s
> \n";
    assert_eq!(got, want);
}

#[test]
fn type_parameters_default_to_real() {
    let got = transcript("polymorphic.vdmsl", "qr 1\npog\nqc\nqr 1\n");
    let want = "\
> Obligation does not have a counterexample/witness. Run qc?
> Generated 1 proof obligation:

Proof Obligation 1: (Unproved)
f: sequence apply obligation in test.vdmsl at line 3:16
(forall s:seq of (@T), i:nat &
  i in set inds s)
> PO #1, FAILED in <t>s: Counterexample: i = 0, s = [],
  T = real
----
f: sequence apply obligation in test.vdmsl at line 3:16
(forall s:seq of (@T), i:nat &
  i in set inds s)

> => print f[real]([], 0)
Error 4064: Value 0 is not a nat1 in test.vdmsl at line 3:16
3:      f(s, i) == s(i);
> \n";
    assert_eq!(got, want);
}

#[test]
fn annotation_chooses_type_arguments() {
    let got = transcript("polymorphic_annotated.vdmsl", "qc\n");
    let want = "\
> PO #1, FAILED in <t>s: Counterexample: i = 0, s = [],
  T = set of (nat)
----
f: sequence apply obligation in test.vdmsl at line 4:16
(forall s:seq of (@T), i:nat &
  i in set inds s)

> \n";
    assert_eq!(got, want);
}

#[test]
fn batch_exit_codes() {
    let run = |spec: &str, args: &str| run_batch_mode(&[spec_path(spec)], args, ToolConfig::default());
    assert_eq!(run("item_at.vdmsl", "").1, EXIT_FAILED);
    assert_eq!(run("item_at_if.vdmsl", "").1, EXIT_OK);
    assert_eq!(run("item_at_pre.vdmsl", "").1, EXIT_OK);
    assert_eq!(run("item_at.vdmsl", "-q -v").1, EXIT_LOAD_ERROR);
    assert_eq!(run("item_at.vdmsl", "-s nonsense").1, EXIT_LOAD_ERROR);

    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.vdmsl");
    std::fs::write(&broken, "functions\n  f: nat -> nat\n  f(x) == x +;\n").unwrap();
    let (text, code) = run_batch_mode(&[broken], "", ToolConfig::default());
    assert_eq!(code, EXIT_LOAD_ERROR, "{text}");
    assert!(!text.is_empty());
}

#[test]
fn status_filters_and_selection() {
    let mut s = Session::new(example("specimen.vdmsl"), ToolConfig::default());
    let all = s.qc(&[] as &[&str]).unwrap().results;
    let failed = s.qc(&["-i", "failed"]).unwrap();
    let expected = all.iter().filter(|r| r.status.filter_name() == "failed").count();
    assert_eq!(failed.text.lines().filter(|l| l.starts_with("PO #")).count(), expected);
    let some = s.qc(&["2", "-", "4"]).unwrap().results;
    assert_eq!(some.iter().map(|r| r.number).collect::<Vec<_>>(), vec![2, 3, 4]);
}
