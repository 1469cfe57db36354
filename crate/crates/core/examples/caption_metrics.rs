// Corpus BLEU, ROUGE and METEOR-lite for molecule captions.
//
//     cargo run --example caption_metrics

use chemtext::text_metrics::{bleu, levenshtein, meteor_lite, rouge_l, rouge_n, TokenizedText};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let refs = [
        "The molecule is a primary alcohol that is ethane substituted by a hydroxy group.",
        "The molecule is an aromatic compound consisting of a benzene ring.",
        "It is a carboxylic acid with two carbons.",
    ];
    let cands = [
        "The molecule is a primary alcohol that is ethane with a hydroxy group.",
        "The molecule is an aromatic hydrocarbon made of one benzene ring.",
        "It is a short chain carboxylic acids.",
    ];
    let c: Vec<_> = cands.iter().map(|s| TokenizedText::new(s)).collect();
    let r: Vec<_> = refs.iter().map(|s| TokenizedText::new(s)).collect();

    for m in [bleu(&c, &r, 2)?, bleu(&c, &r, 4)?, rouge_n(&c, &r, 1)?, rouge_n(&c, &r, 2)?, rouge_l(&c, &r)?, meteor_lite(&c, &r)?] {
        println!("{m}");
    }
    // stemming lets "acids" meet "acid" in METEOR but not in BLEU
    println!("levenshtein(CCO, CCN) = {}", levenshtein("CCO", "CCN"));
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
