//! Deterministic generator for an O*NET-shaped corpus.
//!
//! Every occupation carries a latent routineness score in `[0, 1]`. The score
//! shapes both the wording of its task statements and the skills it links,
//! and a noisy copy of it plays the role of an expert automation assessment
//! from which the balanced label set is drawn. Skill names are real O*NET
//! content-model element names; occupation titles are either real O*NET titles
//! (a fixed anchor list) or composed from per-group vocabularies.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{
    self, Label, LabelRecord, LinkRecord, OccupationRecord, SkillRecord, CorpusPaths,
};
use crate::error::{Error, Result};
use crate::risk::{self, DecliningEntry};
use crate::rng::{derive, seeded, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FixtureSpec {
    pub seed: u64,
    /// Total edges among admitted occupations.
    pub edges: usize,
    pub labeled_per_class: usize,
    /// Most labeled occupations per SOC major group and class.
    pub group_cap: usize,
    /// Occupations written without tasks or without links, excluded on load.
    pub excluded_without_tasks: usize,
    pub excluded_without_links: usize,
    pub min_tasks: usize,
    pub max_tasks: usize,
    /// Spread of occupation routineness around its group mean, in logits.
    pub routineness_spread: f64,
    /// Noise separating the expert assessment from latent routineness, in logits.
    pub expert_noise: f64,
    /// Share of task verbs drawn from the neutral pool.
    pub neutral_verb_share: f64,
    /// Weight of routineness alignment in the skill-link score.
    pub link_alignment: f64,
    /// Weight of domain match in the skill-link score.
    pub link_domain: f64,
    pub link_noise: f64,
}

impl Default for FixtureSpec {
    fn default() -> Self {
        FixtureSpec {
            seed: 2022,
            edges: 13_222,
            labeled_per_class: 56,
            group_cap: 10,
            excluded_without_tasks: 3,
            excluded_without_links: 3,
            min_tasks: 8,
            max_tasks: 16,
            routineness_spread: 1.0,
            expert_noise: 2.5,
            neutral_verb_share: 0.35,
            link_alignment: 1.0,
            link_domain: 1.3,
            link_noise: 0.8,
        }
    }
}

/// SOC major groups: code, name, occupation count, mean routineness.
const GROUPS: &[(&str, &str, usize, f64)] = &[
    ("11", "Management", 50, 0.15),
    ("13", "Business and Financial Operations", 50, 0.45),
    ("15", "Computer and Mathematical", 35, 0.25),
    ("17", "Architecture and Engineering", 60, 0.25),
    ("19", "Life, Physical, and Social Science", 55, 0.2),
    ("21", "Community and Social Service", 18, 0.06),
    ("23", "Legal", 10, 0.35),
    ("25", "Educational Instruction and Library", 60, 0.1),
    ("27", "Arts, Design, Entertainment, Sports, and Media", 42, 0.25),
    ("29", "Healthcare Practitioners and Technical", 80, 0.12),
    ("31", "Healthcare Support", 18, 0.45),
    ("33", "Protective Service", 28, 0.4),
    ("35", "Food Preparation and Serving Related", 17, 0.85),
    ("37", "Building and Grounds Cleaning and Maintenance", 8, 0.6),
    ("39", "Personal Care and Service", 30, 0.4),
    ("41", "Sales and Related", 22, 0.75),
    ("43", "Office and Administrative Support", 56, 0.85),
    ("45", "Farming, Fishing, and Forestry", 14, 0.8),
    ("47", "Construction and Extraction", 58, 0.7),
    ("49", "Installation, Maintenance, and Repair", 52, 0.65),
    ("51", "Production", 105, 0.85),
    ("53", "Transportation and Material Moving", 48, 0.75),
];

/// Per-group title fields, title roles, and task objects.
fn group_vocabulary(group: &str) -> (&'static [&'static str], &'static [&'static str], &'static [&'static str]) {
    match group {
        "11" => (
            &["Operations", "Marketing", "Compliance", "Facilities", "Training", "Logistics", "Investment", "Quality", "Research", "Program", "Property", "Risk"],
            &["Managers", "Directors", "Executives", "Administrators", "Officers"],
            &["budgets", "strategic plans", "staff performance", "organizational policies", "department goals", "contracts", "operating procedures", "resource allocations", "business partnerships", "project portfolios"],
        ),
        "13" => (
            &["Budget", "Claims", "Compensation", "Cost", "Credit", "Financial", "Loan", "Tax", "Purchasing", "Audit", "Benefits", "Logistics"],
            &["Analysts", "Specialists", "Examiners", "Agents", "Officers"],
            &["financial statements", "loan applications", "tax returns", "insurance claims", "cost estimates", "audit reports", "account balances", "purchase orders", "benefit plans", "credit records"],
        ),
        "15" => (
            &["Software", "Network", "Database", "Security", "Web", "Systems", "Data", "Statistical", "Support"],
            &["Developers", "Analysts", "Administrators", "Engineers", "Specialists"],
            &["software code", "network configurations", "database queries", "user requirements", "security protocols", "system logs", "statistical models", "test scripts", "data pipelines", "technical documentation"],
        ),
        "17" => (
            &["Civil", "Mechanical", "Electrical", "Chemical", "Industrial", "Aerospace", "Environmental", "Materials", "Mining", "Marine", "Structural", "Surveying"],
            &["Engineers", "Technicians", "Drafters", "Technologists", "Designers"],
            &["engineering drawings", "structural designs", "prototype components", "technical specifications", "site surveys", "load calculations", "test results", "material samples", "project schedules", "safety analyses"],
        ),
        "19" => (
            &["Biological", "Chemical", "Soil", "Atmospheric", "Forensic", "Economic", "Survey", "Clinical", "Environmental", "Geological", "Food", "Social"],
            &["Scientists", "Researchers", "Technicians", "Analysts", "Specialists"],
            &["laboratory samples", "research data", "experimental designs", "field observations", "scientific literature", "survey responses", "chemical compounds", "specimens", "research findings", "statistical data"],
        ),
        "21" => (
            &["Rehabilitation", "Family", "Youth", "Community", "Substance Abuse", "Mental Health"],
            &["Counselors", "Social Workers", "Advocates"],
            &["client cases", "treatment plans", "counseling sessions", "community programs", "family services", "support groups", "referral networks", "crisis interventions"],
        ),
        "23" => (
            &["Trial", "Corporate", "Patent", "Court", "Title"],
            &["Attorneys", "Paralegals", "Clerks"],
            &["legal documents", "court filings", "case law", "contracts", "client testimony", "title records", "legal briefs", "settlement terms"],
        ),
        "25" => (
            &["Elementary", "Secondary", "Special Education", "Adult Literacy", "Vocational", "Art", "Biology", "History", "Library", "Music", "Physics", "Language"],
            &["Teachers", "Instructors", "Professors", "Coordinators", "Technicians"],
            &["lesson plans", "student progress", "curriculum materials", "classroom activities", "course syllabi", "library collections", "student assessments", "educational programs", "lectures", "learning objectives"],
        ),
        "27" => (
            &["Graphic", "Fashion", "Interior", "Film", "Sound", "Broadcast", "Museum", "Commercial", "Set", "Editorial"],
            &["Designers", "Artists", "Producers", "Editors", "Technicians"],
            &["visual concepts", "design layouts", "audio recordings", "manuscripts", "artistic performances", "media content", "exhibit displays", "promotional materials", "storyboards", "broadcast segments"],
        ),
        "29" => (
            &["Cardiovascular", "Respiratory", "Surgical", "Radiologic", "Pediatric", "Dental", "Occupational", "Nuclear Medicine", "Orthopedic", "Psychiatric", "Emergency", "Pharmacy", "Dietetic", "Ophthalmic", "Clinical"],
            &["Physicians", "Nurses", "Therapists", "Technologists", "Technicians", "Specialists"],
            &["patient symptoms", "medical histories", "treatment plans", "diagnostic images", "medications", "clinical procedures", "patient care", "health assessments", "laboratory results", "rehabilitation programs"],
        ),
        "31" => (
            &["Nursing", "Medical", "Dental", "Pharmacy", "Veterinary", "Physical Therapist"],
            &["Assistants", "Aides", "Attendants"],
            &["patient records", "medical supplies", "vital signs", "examination rooms", "specimens", "appointment schedules", "sterilized instruments", "patient meals"],
        ),
        "33" => (
            &["Fire", "Police", "Security", "Transit", "Correctional", "Fish and Game", "Crossing"],
            &["Officers", "Guards", "Inspectors", "Investigators", "Supervisors"],
            &["security patrols", "incident reports", "emergency calls", "surveillance equipment", "crime scenes", "safety inspections", "access points", "evidence"],
        ),
        "35" => (
            &["Fast Food", "Institution", "Restaurant", "Short Order", "Banquet", "Cafeteria"],
            &["Cooks", "Servers", "Attendants", "Workers"],
            &["food orders", "ingredients", "kitchen equipment", "menu items", "serving stations", "dishes", "food portions", "beverage orders"],
        ),
        "37" => (
            &["Building", "Grounds", "Pest Control", "Housekeeping"],
            &["Cleaners", "Workers", "Attendants"],
            &["floors and surfaces", "cleaning supplies", "lawns", "waste containers", "pest treatments", "building fixtures"],
        ),
        "39" => (
            &["Childcare", "Fitness", "Tour", "Funeral", "Recreation", "Hair", "Animal Care"],
            &["Workers", "Attendants", "Guides", "Trainers", "Specialists"],
            &["client appointments", "recreational activities", "care routines", "travel itineraries", "service requests", "animal enclosures", "grooming supplies", "program schedules"],
        ),
        "41" => (
            &["Retail", "Wholesale", "Insurance", "Advertising", "Securities", "Travel", "Parts", "Counter"],
            &["Sales Agents", "Salespersons", "Representatives", "Clerks"],
            &["sales transactions", "product displays", "customer orders", "price quotes", "sales records", "merchandise", "customer accounts", "inventory counts"],
        ),
        "43" => (
            &["Billing", "Records", "Shipping", "Receiving", "Correspondence", "Brokerage", "Statement", "Court", "License", "Hotel", "Loan", "Reservation", "Dispatch", "Inventory"],
            &["Clerks", "Assistants", "Operators", "Coordinators", "Processors"],
            &["invoices", "customer records", "forms", "correspondence", "appointment schedules", "account data", "filing systems", "shipping documents", "inventory records", "office equipment"],
        ),
        "45" => (
            &["Farm", "Forest", "Nursery", "Fishing", "Agricultural", "Log"],
            &["Workers", "Graders", "Operators", "Technicians"],
            &["crops", "livestock", "harvested products", "farm equipment", "timber", "fish catches", "seedlings", "produce samples"],
        ),
        "47" => (
            &["Concrete", "Drywall", "Roofing", "Pipe", "Tile", "Insulation", "Glazing", "Rail Track", "Drilling", "Paving", "Masonry", "Floor", "Fence"],
            &["Workers", "Installers", "Operators", "Helpers", "Finishers"],
            &["building materials", "construction sites", "power tools", "concrete forms", "pipe fittings", "roofing materials", "blueprints", "scaffolding", "drilling equipment", "excavation areas"],
        ),
        "49" => (
            &["Automotive", "Aircraft", "Appliance", "Elevator", "Telecommunications", "Wind Turbine", "Industrial Machinery", "Heating", "Locksmith", "Bicycle", "Camera"],
            &["Mechanics", "Technicians", "Repairers", "Installers", "Servicers"],
            &["mechanical parts", "electrical wiring", "engine components", "repair orders", "diagnostic equipment", "hydraulic systems", "replacement parts", "maintenance logs", "control circuits", "equipment malfunctions"],
        ),
        "51" => (
            &["Machine", "Textile", "Metal", "Plastic", "Food Batchmaking", "Printing", "Woodworking", "Chemical Plant", "Packaging", "Extruding", "Grinding", "Welding", "Assembly", "Furnace", "Coating", "Cutting"],
            &["Operators", "Tenders", "Setters", "Workers", "Assemblers", "Inspectors", "Finishers"],
            &["machine settings", "production materials", "assembled products", "finished parts", "product samples", "conveyor systems", "production records", "raw materials", "molds and dies", "quality specifications"],
        ),
        "53" => (
            &["Truck", "Bus", "Rail", "Crane", "Conveyor", "Ship", "Freight", "Tank Car", "Parking", "Aircraft Cargo"],
            &["Drivers", "Operators", "Loaders", "Attendants", "Handlers"],
            &["freight", "delivery routes", "vehicle logs", "cargo loads", "transport schedules", "shipping containers", "loading equipment", "passenger manifests"],
        ),
        _ => (&["General"], &["Workers"], &["work materials"]),
    }
}

const ROUTINE_VERBS: &[&str] = &[
    "record", "file", "sort", "enter", "verify", "process", "operate", "tabulate", "compile", "load", "count", "copy",
    "type", "stamp", "weigh", "measure", "package", "feed", "monitor", "inspect", "tend", "assemble", "schedule",
    "post", "scan",
];
const CREATIVE_VERBS: &[&str] = &[
    "design", "develop", "negotiate", "counsel", "diagnose", "lead", "plan", "teach", "advise", "evaluate", "research",
    "coordinate", "persuade", "mentor", "create", "direct", "investigate", "interpret", "formulate", "supervise",
    "treat", "compose", "consult", "improvise", "analyze",
];
const NEUTRAL_VERBS: &[&str] = &[
    "prepare", "maintain", "review", "communicate", "provide", "ensure", "perform", "use", "assist", "participate",
];
const ROUTINE_MODIFIERS: &[&str] = &[
    "according to established procedures",
    "using standard forms",
    "following written instructions",
    "on a fixed schedule",
    "to meet production quotas",
    "in accordance with checklists",
    "using automated equipment",
    "for accuracy and completeness",
];
const CREATIVE_MODIFIERS: &[&str] = &[
    "to develop new approaches",
    "in collaboration with stakeholders",
    "to resolve complex problems",
    "based on professional judgment",
    "to meet individual client needs",
    "to improve outcomes",
    "in unfamiliar situations",
    "through original research",
];

/// O*NET content-model elements merged into the skill node set:
/// (category, element names).
pub const SKILL_SOURCES: &[(&str, &[&str])] = &[
    (
        "Skills",
        &[
            "Reading Comprehension", "Active Listening", "Writing", "Speaking", "Mathematics", "Science",
            "Critical Thinking", "Active Learning", "Learning Strategies", "Monitoring", "Social Perceptiveness",
            "Coordination", "Persuasion", "Negotiation", "Instructing", "Service Orientation",
            "Complex Problem Solving", "Operations Analysis", "Technology Design", "Equipment Selection",
            "Installation", "Programming", "Operations Monitoring", "Operation and Control", "Equipment Maintenance",
            "Troubleshooting", "Repairing", "Quality Control Analysis", "Judgment and Decision Making",
            "Systems Analysis", "Systems Evaluation", "Time Management", "Management of Financial Resources",
            "Management of Material Resources", "Management of Personnel Resources",
        ],
    ),
    (
        "Knowledge",
        &[
            "Administration and Management", "Administrative", "Economics and Accounting", "Sales and Marketing",
            "Customer and Personal Service", "Personnel and Human Resources", "Production and Processing",
            "Food Production", "Computers and Electronics", "Engineering and Technology", "Design",
            "Building and Construction", "Mechanical", "Mathematics", "Physics", "Chemistry", "Biology",
            "Psychology", "Sociology and Anthropology", "Geography", "Medicine and Dentistry",
            "Therapy and Counseling", "Education and Training", "English Language", "Foreign Language", "Fine Arts",
            "History and Archeology", "Philosophy and Theology", "Public Safety and Security", "Law and Government",
            "Telecommunications", "Communications and Media", "Transportation",
        ],
    ),
    (
        "Abilities",
        &[
            "Oral Comprehension", "Written Comprehension", "Oral Expression", "Written Expression",
            "Fluency of Ideas", "Originality", "Problem Sensitivity", "Deductive Reasoning", "Inductive Reasoning",
            "Information Ordering", "Category Flexibility", "Mathematical Reasoning", "Number Facility",
            "Memorization", "Speed of Closure", "Flexibility of Closure", "Perceptual Speed", "Spatial Orientation",
            "Visualization", "Selective Attention", "Time Sharing", "Arm-Hand Steadiness", "Manual Dexterity",
            "Finger Dexterity", "Control Precision", "Multilimb Coordination", "Response Orientation",
            "Rate Control", "Reaction Time", "Wrist-Finger Speed", "Speed of Limb Movement", "Static Strength",
            "Explosive Strength", "Dynamic Strength", "Trunk Strength", "Stamina", "Extent Flexibility",
            "Dynamic Flexibility", "Gross Body Coordination", "Gross Body Equilibrium", "Near Vision", "Far Vision",
            "Visual Color Discrimination", "Night Vision", "Peripheral Vision", "Depth Perception",
            "Glare Sensitivity", "Hearing Sensitivity", "Auditory Attention", "Sound Localization",
            "Speech Recognition", "Speech Clarity",
        ],
    ),
    (
        "Work Styles",
        &[
            "Persistence", "Initiative", "Leadership", "Cooperation", "Concern for Others", "Social Orientation",
            "Self-Control", "Stress Tolerance", "Adaptability/Flexibility", "Dependability", "Attention to Detail",
            "Integrity", "Independence", "Innovation", "Analytical Thinking",
        ],
    ),
];

/// Id prefixes for the categories above.
const SKILL_PREFIXES: &[&str] = &["SK", "KN", "AB", "WS"];

/// Routineness loading of a skill: positive for skills typical of routine
/// work, negative for creative and social ones.
fn skill_loading(category: &str, name: &str) -> f64 {
    match (category, name) {
        (_, "Operation and Control") => 0.8,
        (_, "Administrative") => 0.9,
        (_, "Production and Processing") => 0.8,
        (_, "Wrist-Finger Speed") => 0.8,
        (_, "Perceptual Speed") => 0.7,
        (_, "Finger Dexterity") | (_, "Manual Dexterity") => 0.7,
        (_, "Operations Monitoring") | (_, "Quality Control Analysis") => 0.6,
        (_, "Number Facility") | (_, "Arm-Hand Steadiness") | (_, "Control Precision") => 0.6,
        (_, "Attention to Detail") | (_, "Food Production") => 0.6,
        (_, "Equipment Maintenance") | (_, "Multilimb Coordination") | (_, "Rate Control") => 0.5,
        (_, "Static Strength") | (_, "Transportation") => 0.5,
        (_, "Reaction Time") | (_, "Trunk Strength") | (_, "Stamina") | (_, "Dependability") => 0.4,
        (_, "Selective Attention") | (_, "Mechanical") | (_, "Economics and Accounting") => 0.4,
        (_, "Dynamic Strength") | (_, "Extent Flexibility") | (_, "Speed of Closure") => 0.3,
        (_, "Visual Color Discrimination") | (_, "Near Vision") | (_, "Customer and Personal Service") => 0.3,
        (_, "Self-Control") => 0.2,
        (_, "Originality") => -0.9,
        (_, "Fluency of Ideas") | (_, "Persuasion") | (_, "Negotiation") | (_, "Social Perceptiveness") => -0.8,
        (_, "Leadership") | (_, "Innovation") | (_, "Therapy and Counseling") | (_, "Medicine and Dentistry") => -0.8,
        (_, "Complex Problem Solving") | (_, "Learning Strategies") | (_, "Technology Design") => -0.7,
        (_, "Management of Personnel Resources") | (_, "Psychology") | (_, "Education and Training") => -0.7,
        (_, "Fine Arts") => -0.7,
        (_, "Judgment and Decision Making") | (_, "Instructing") | (_, "Systems Analysis") => -0.6,
        (_, "Systems Evaluation") | (_, "Science") | (_, "Operations Analysis") | (_, "Concern for Others") => -0.6,
        (_, "Sociology and Anthropology") | (_, "Design") | (_, "Philosophy and Theology") => -0.6,
        (_, "Critical Thinking") | (_, "Active Learning") | (_, "Management of Financial Resources") => -0.5,
        (_, "Initiative") | (_, "Inductive Reasoning") | (_, "Biology") | (_, "Physics") => -0.5,
        (_, "Administration and Management") => -0.5,
        (_, "Coordination") | (_, "Writing") | (_, "Adaptability/Flexibility") | (_, "Deductive Reasoning") => -0.4,
        (_, "Problem Sensitivity") | (_, "Written Expression") | (_, "Chemistry") => -0.4,
        (_, "Engineering and Technology") | (_, "Personnel and Human Resources") | (_, "Analytical Thinking") => -0.4,
        (_, "Programming") | (_, "Oral Expression") | (_, "Law and Government") | (_, "Independence") => -0.3,
        (_, "Category Flexibility") => -0.3,
        (_, "Stress Tolerance") => -0.2,
        _ => 0.0,
    }
}

/// Major groups in which a skill is especially common.
fn skill_domains(name: &str) -> &'static [&'static str] {
    match name {
        "Medicine and Dentistry" => &["29", "31"],
        "Therapy and Counseling" => &["21", "29"],
        "Biology" | "Science" => &["19", "29"],
        "Chemistry" => &["19", "51"],
        "Physics" => &["17", "19"],
        "Food Production" => &["35", "45"],
        "Building and Construction" => &["47", "37"],
        "Mechanical" => &["47", "49", "51", "53"],
        "Transportation" => &["53"],
        "Computers and Electronics" => &["15", "17", "43"],
        "Programming" => &["15"],
        "Engineering and Technology" => &["17", "15"],
        "Design" => &["17", "27"],
        "Fine Arts" | "Communications and Media" => &["27"],
        "Education and Training" | "Instructing" => &["25"],
        "Law and Government" => &["23", "33"],
        "Public Safety and Security" => &["33", "53"],
        "Sales and Marketing" => &["41", "11"],
        "Economics and Accounting" => &["13", "43", "11"],
        "Administrative" => &["43"],
        "Customer and Personal Service" => &["41", "43", "39", "35"],
        "Personnel and Human Resources" => &["11", "13"],
        "Administration and Management" | "Management of Personnel Resources" => &["11"],
        "Psychology" => &["21", "25", "29"],
        "Sociology and Anthropology" => &["19", "21"],
        "Geography" => &["19", "53"],
        "History and Archeology" | "Philosophy and Theology" => &["21", "25"],
        "Foreign Language" => &["25", "27"],
        "Telecommunications" => &["15", "43", "49"],
        "Production and Processing" => &["51", "35"],
        "Installation" => &["49", "47"],
        "Repairing" => &["49"],
        "Equipment Maintenance" => &["49", "51"],
        "Troubleshooting" => &["49", "15"],
        "Equipment Selection" => &["49", "17"],
        "Operation and Control" | "Operations Monitoring" => &["51", "53"],
        "Quality Control Analysis" => &["51"],
        "Mathematics" | "Mathematical Reasoning" => &["15", "17", "13"],
        "Management of Financial Resources" => &["11", "13"],
        "Management of Material Resources" => &["11", "51"],
        "Negotiation" => &["11", "23", "41"],
        "Persuasion" => &["41", "23"],
        "Service Orientation" => &["39", "31", "35"],
        "Static Strength" | "Dynamic Strength" | "Trunk Strength" | "Stamina" | "Explosive Strength"
        | "Extent Flexibility" | "Dynamic Flexibility" | "Gross Body Coordination" | "Gross Body Equilibrium" => {
            &["37", "45", "47", "51", "53"]
        }
        "Night Vision" | "Far Vision" | "Glare Sensitivity" | "Peripheral Vision" | "Depth Perception" => &["53", "33"],
        "Hearing Sensitivity" | "Sound Localization" | "Auditory Attention" => &["33", "53", "27"],
        "Finger Dexterity" | "Manual Dexterity" | "Arm-Hand Steadiness" | "Wrist-Finger Speed" => &["51", "49", "31"],
        "Number Facility" | "Perceptual Speed" => &["43", "13"],
        "Originality" | "Fluency of Ideas" => &["27", "17"],
        _ => &[],
    }
}

/// Skills linked by most occupations regardless of field.
fn skill_popularity(name: &str) -> f64 {
    match name {
        "Reading Comprehension" | "Active Listening" | "Speaking" | "Critical Thinking" | "Oral Comprehension"
        | "Oral Expression" | "English Language" | "Near Vision" | "Dependability" | "Integrity"
        | "Attention to Detail" | "Cooperation" | "Monitoring" | "Problem Sensitivity" | "Speech Recognition"
        | "Speech Clarity" | "Written Comprehension" | "Time Management" => 1.2,
        _ => 0.0,
    }
}

/// A real occupation placed in the fixture: SOC code, O*NET title, and an
/// approximate published automation probability used as its routineness.
pub struct Anchor {
    pub soc_code: &'static str,
    pub title: &'static str,
    pub routineness: f64,
    /// Reserved for risk reporting: never drawn into the label set.
    pub reserved: bool,
}

pub const ANCHORS: &[Anchor] = &[
    Anchor { soc_code: "43-4071.00", title: "File Clerks", routineness: 0.97, reserved: true },
    Anchor { soc_code: "41-9021.00", title: "Real Estate Brokers", routineness: 0.97, reserved: true },
    Anchor { soc_code: "43-9022.00", title: "Word Processors and Typists", routineness: 0.81, reserved: true },
    Anchor { soc_code: "43-3051.00", title: "Payroll and Timekeeping Clerks", routineness: 0.97, reserved: true },
    Anchor { soc_code: "43-9021.00", title: "Data Entry Keyers", routineness: 0.99, reserved: true },
    Anchor { soc_code: "17-2051.01", title: "Transportation Engineers", routineness: 0.3, reserved: true },
    Anchor { soc_code: "13-2041.00", title: "Credit Analysts", routineness: 0.98, reserved: true },
    Anchor { soc_code: "13-1032.00", title: "Insurance Appraisers, Auto Damage", routineness: 0.98, reserved: true },
    Anchor { soc_code: "13-2053.00", title: "Insurance Underwriters", routineness: 0.99, reserved: true },
    Anchor { soc_code: "13-2081.00", title: "Tax Examiners and Collectors, and Revenue Agents", routineness: 0.93, reserved: true },
    Anchor { soc_code: "41-2011.00", title: "Cashiers", routineness: 0.97, reserved: true },
    Anchor { soc_code: "43-6014.00", title: "Secretaries and Administrative Assistants, Except Legal, Medical, and Executive", routineness: 0.96, reserved: true },
    Anchor { soc_code: "43-4051.00", title: "Customer Service Representatives", routineness: 0.55, reserved: true },
    Anchor { soc_code: "43-6011.00", title: "Executive Secretaries and Executive Administrative Assistants", routineness: 0.86, reserved: true },
    Anchor { soc_code: "43-3031.00", title: "Bookkeeping, Accounting, and Auditing Clerks", routineness: 0.98, reserved: true },
    Anchor { soc_code: "51-2092.00", title: "Team Assemblers", routineness: 0.95, reserved: true },
    Anchor { soc_code: "43-3071.00", title: "Tellers", routineness: 0.98, reserved: true },
    Anchor { soc_code: "43-9061.00", title: "Office Clerks, General", routineness: 0.96, reserved: true },
    Anchor { soc_code: "51-9061.00", title: "Inspectors, Testers, Sorters, Samplers, and Weighers", routineness: 0.98, reserved: true },
    Anchor { soc_code: "15-1251.00", title: "Computer Programmers", routineness: 0.48, reserved: true },
    Anchor { soc_code: "43-6012.00", title: "Legal Secretaries and Administrative Assistants", routineness: 0.98, reserved: true },
    Anchor { soc_code: "43-2011.00", title: "Switchboard Operators, Including Answering Service", routineness: 0.96, reserved: true },
    Anchor { soc_code: "43-5053.00", title: "Postal Service Mail Sorters, Processors, and Processing Machine Operators", routineness: 0.79, reserved: true },
    Anchor { soc_code: "41-9041.00", title: "Telemarketers", routineness: 0.99, reserved: true },
    Anchor { soc_code: "41-2022.00", title: "Parts Salespersons", routineness: 0.98, reserved: true },
    Anchor { soc_code: "51-6031.00", title: "Sewing Machine Operators", routineness: 0.89, reserved: true },
    Anchor { soc_code: "51-2028.00", title: "Electrical, Electronic, and Electromechanical Assemblers, Except Coil Winders, Tapers, and Finishers", routineness: 0.95, reserved: true },
    Anchor { soc_code: "53-7063.00", title: "Machine Feeders and Offbearers", routineness: 0.93, reserved: true },
    Anchor { soc_code: "43-4151.00", title: "Order Clerks", routineness: 0.98, reserved: true },
    Anchor { soc_code: "43-9041.00", title: "Insurance Claims and Policy Processing Clerks", routineness: 0.98, reserved: true },
    Anchor { soc_code: "43-3061.00", title: "Procurement Clerks", routineness: 0.98, reserved: true },
    Anchor { soc_code: "41-9091.00", title: "Door-to-Door Sales Workers, News and Street Vendors, and Related Workers", routineness: 0.94, reserved: true },
    Anchor { soc_code: "43-3021.00", title: "Billing and Posting Clerks", routineness: 0.96, reserved: true },
    Anchor { soc_code: "51-5113.00", title: "Print Binding and Finishing Workers", routineness: 0.95, reserved: true },
    Anchor { soc_code: "43-9051.00", title: "Mail Clerks and Mail Machine Operators, Except Postal Service", routineness: 0.95, reserved: true },
    Anchor { soc_code: "29-1125.00", title: "Recreational Therapists", routineness: 0.003, reserved: false },
    Anchor { soc_code: "11-9161.00", title: "Emergency Management Directors", routineness: 0.003, reserved: false },
    Anchor { soc_code: "21-1023.00", title: "Mental Health and Substance Abuse Social Workers", routineness: 0.003, reserved: false },
    Anchor { soc_code: "29-1181.00", title: "Audiologists", routineness: 0.003, reserved: false },
    Anchor { soc_code: "29-1122.00", title: "Occupational Therapists", routineness: 0.004, reserved: false },
    Anchor { soc_code: "21-1022.00", title: "Healthcare Social Workers", routineness: 0.004, reserved: false },
    Anchor { soc_code: "29-1031.00", title: "Dietitians and Nutritionists", routineness: 0.004, reserved: false },
    Anchor { soc_code: "27-2032.00", title: "Choreographers", routineness: 0.004, reserved: false },
    Anchor { soc_code: "25-9031.00", title: "Instructional Coordinators", routineness: 0.004, reserved: false },
    Anchor { soc_code: "19-3031.02", title: "Clinical Psychologists", routineness: 0.004, reserved: false },
    Anchor { soc_code: "25-2021.00", title: "Elementary School Teachers, Except Special Education", routineness: 0.004, reserved: false },
    Anchor { soc_code: "23-2093.00", title: "Title Examiners, Abstractors, and Searchers", routineness: 0.99, reserved: false },
    Anchor { soc_code: "51-6051.00", title: "Sewers, Hand", routineness: 0.99, reserved: false },
    Anchor { soc_code: "15-2091.00", title: "Mathematical Technicians", routineness: 0.99, reserved: false },
    Anchor { soc_code: "49-9064.00", title: "Watch and Clock Repairers", routineness: 0.99, reserved: false },
    Anchor { soc_code: "43-5011.00", title: "Cargo and Freight Agents", routineness: 0.99, reserved: false },
    Anchor { soc_code: "13-2082.00", title: "Tax Preparers", routineness: 0.99, reserved: false },
    Anchor { soc_code: "51-9151.00", title: "Photographic Process Workers and Processing Machine Operators", routineness: 0.99, reserved: false },
    Anchor { soc_code: "43-4141.00", title: "New Accounts Clerks", routineness: 0.99, reserved: false },
    Anchor { soc_code: "25-4031.00", title: "Library Technicians", routineness: 0.99, reserved: false },
];

/// Titles and approximate projected declines (thousands of jobs, 2020 to
/// 2030) of the occupations listed as declining most. The figures are
/// rounded illustrations, not an authoritative extract.
pub const DECLINING: &[(&str, &str, f64)] = &[
    ("Cashiers", "41-2011.00", -335.4),
    ("Secretaries and Administrative Assistants, Except Legal, Medical, and Executive", "43-6014.00", -176.2),
    ("Customer Service Representatives", "43-4051.00", -138.1),
    ("Executive Secretaries and Executive Administrative Assistants", "43-6011.00", -112.2),
    ("Bookkeeping, Accounting, and Auditing Clerks", "43-3031.00", -105.7),
    ("Team Assemblers", "51-2092.00", -99.9),
    ("Tellers", "43-3071.00", -56.6),
    ("Office Clerks, General", "43-9061.00", -53.8),
    ("Data Entry Keyers", "43-9021.00", -46.9),
    ("Inspectors, Testers, Sorters, Samplers, and Weighers", "51-9061.00", -44.6),
    ("Computer Programmers", "15-1251.00", -41.6),
    ("Legal Secretaries and Administrative Assistants", "43-6012.00", -36.9),
    ("Sewing Machine Operators", "51-6031.00", -34.6),
    ("Electrical, Electronic, and Electromechanical Assemblers", "51-2028.00", -31.2),
    ("Switchboard Operators, Including Answering Service", "43-2011.00", -26.0),
    ("Parts Salespersons", "41-2022.00", -22.5),
    ("Telemarketers", "41-9041.00", -22.0),
    ("Insurance Claims and Policy Processing Clerks", "43-9041.00", -21.0),
    ("Postal Service Mail Sorters, Processors, and Processing Machine Operators", "43-5053.00", -19.8),
    ("Word Processors and Typists", "43-9022.00", -17.4),
    ("Payroll and Timekeeping Clerks", "43-3051.00", -15.4),
    ("File Clerks", "43-4071.00", -14.6),
    ("Order Clerks", "43-4151.00", -14.6),
    ("Machine Feeders and Offbearers", "53-7063.00", -12.0),
    ("Billing and Posting Clerks", "43-3021.00", -12.0),
    ("Procurement Clerks", "43-3061.00", -11.1),
    ("Door-to-Door Sales Workers, News and Street Vendors, and Related Workers", "41-9091.00", -10.6),
    ("Mail Clerks and Mail Machine Operators, Except Postal Service", "43-9051.00", -10.0),
    ("Print Binding and Finishing Workers", "51-5113.00", -8.5),
];

/// Everything the generator produces.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub spec: FixtureSpec,
    /// All written occupations, including the ones excluded on load.
    pub occupations: Vec<OccupationRecord>,
    pub skills: Vec<SkillRecord>,
    pub links: Vec<LinkRecord>,
    pub labels: Vec<LabelRecord>,
    pub declining: Vec<DecliningEntry>,
    /// `(soc_code, major group, routineness, expert probability)` per occupation.
    pub latent: Vec<(String, String, f64, f64)>,
}

fn logit(p: f64) -> f64 {
    let p = p.clamp(1e-4, 1.0 - 1e-4);
    (p / (1.0 - p)).ln()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn pick<'a>(rng: &mut Rng, items: &[&'a str]) -> &'a str {
    items[rng.gen_range(0..items.len())]
}

fn task_statement(rng: &mut Rng, routineness: f64, objects: &[&str], neutral_share: f64) -> String {
    let verb = if rng.gen::<f64>() < neutral_share {
        pick(rng, NEUTRAL_VERBS)
    } else if rng.gen::<f64>() < routineness {
        pick(rng, ROUTINE_VERBS)
    } else {
        pick(rng, CREATIVE_VERBS)
    };
    let object = pick(rng, objects);
    let modifier = if rng.gen::<f64>() < routineness {
        pick(rng, ROUTINE_MODIFIERS)
    } else {
        pick(rng, CREATIVE_MODIFIERS)
    };
    format!("{} {object} {modifier}.", capitalize(verb))
}

struct Draft {
    soc_code: String,
    title: String,
    group: String,
    routineness: f64,
    reserved: bool,
}

fn draft_occupations(spec: &FixtureSpec) -> Vec<Draft> {
    let mut rng = seeded(derive(spec.seed, 1));
    let spread = Normal::new(0.0, spec.routineness_spread).expect("valid spread");
    let anchor_codes: BTreeSet<&str> = ANCHORS.iter().map(|a| a.soc_code).collect();
    let anchor_titles: BTreeSet<&str> = ANCHORS.iter().map(|a| a.title).collect();
    let mut drafts = Vec::new();
    for &(group, _, count, mean) in GROUPS {
        let anchors: Vec<&Anchor> = ANCHORS.iter().filter(|a| a.soc_code.starts_with(group)).collect();
        for a in &anchors {
            drafts.push(Draft {
                soc_code: a.soc_code.to_string(),
                title: a.title.to_string(),
                group: group.to_string(),
                routineness: a.routineness,
                reserved: a.reserved,
            });
        }
        let (fields, roles, _) = group_vocabulary(group);
        let mut titles: Vec<String> = fields
            .iter()
            .flat_map(|f| roles.iter().map(move |r| format!("{f} {r}")))
            .filter(|t| !anchor_titles.contains(t.as_str()))
            .collect();
        titles.shuffle(&mut rng);
        let needed = count.saturating_sub(anchors.len());
        assert!(titles.len() >= needed, "group {group} has too few title combinations");
        let mut number = 1011;
        for title in titles.into_iter().take(needed) {
            let code = loop {
                let c = format!("{group}-{number:04}.00");
                number += 10;
                if !anchor_codes.contains(c.as_str()) {
                    break c;
                }
            };
            drafts.push(Draft {
                soc_code: code,
                title,
                group: group.to_string(),
                routineness: sigmoid(logit(mean) + spread.sample(&mut rng)),
                reserved: false,
            });
        }
    }
    drafts.sort_by(|a, b| a.soc_code.cmp(&b.soc_code));
    drafts
}

fn skill_records() -> Vec<(SkillRecord, &'static str)> {
    let mut out = Vec::new();
    for (k, (category, names)) in SKILL_SOURCES.iter().enumerate() {
        for (i, name) in names.iter().enumerate() {
            out.push((
                SkillRecord {
                    skill_id: format!("{}{:02}", SKILL_PREFIXES[k], i + 1),
                    name: name.to_string(),
                },
                *category,
            ));
        }
    }
    out
}

/// Integer degrees proportional to `weights` summing exactly to `total`.
fn apportion_degrees(weights: &[f64], total: usize, cap: usize) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    let raw: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut deg: Vec<usize> = raw.iter().map(|r| (r.floor() as usize).clamp(1, cap)).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| (raw[b] - raw[b].floor()).total_cmp(&(raw[a] - raw[a].floor())).then(a.cmp(&b)));
    let mut assigned: usize = deg.iter().sum();
    let mut k = 0;
    while assigned < total {
        let i = order[k % order.len()];
        if deg[i] < cap {
            deg[i] += 1;
            assigned += 1;
        }
        k += 1;
    }
    while assigned > total {
        let i = order[k % order.len()];
        if deg[i] > 1 {
            deg[i] -= 1;
            assigned -= 1;
        }
        k += 1;
    }
    deg
}

pub fn generate(spec: &FixtureSpec) -> Result<Fixture> {
    let drafts = draft_occupations(spec);
    let skills = skill_records();
    let n_excluded = spec.excluded_without_tasks + spec.excluded_without_links;

    // Excluded occupations: non-anchor drafts spread over the list.
    let candidates: Vec<usize> = (0..drafts.len()).filter(|&i| !ANCHORS.iter().any(|a| a.soc_code == drafts[i].soc_code)).collect();
    let mut rng = seeded(derive(spec.seed, 2));
    let mut chosen: Vec<usize> = candidates.choose_multiple(&mut rng, n_excluded).copied().collect();
    chosen.sort_unstable();
    let no_tasks: BTreeSet<usize> = chosen.iter().take(spec.excluded_without_tasks).copied().collect();
    let no_links: BTreeSet<usize> = chosen.iter().skip(spec.excluded_without_tasks).copied().collect();

    // Task statements.
    let mut rng = seeded(derive(spec.seed, 3));
    let mut occupations = Vec::with_capacity(drafts.len());
    for (i, d) in drafts.iter().enumerate() {
        let (_, _, objects) = group_vocabulary(&d.group);
        let n = rng.gen_range(spec.min_tasks..=spec.max_tasks);
        let tasks = if no_tasks.contains(&i) {
            Vec::new()
        } else {
            (0..n).map(|_| task_statement(&mut rng, d.routineness, objects, spec.neutral_verb_share)).collect()
        };
        occupations.push(OccupationRecord {
            soc_code: d.soc_code.clone(),
            title: d.title.clone(),
            task_statements: tasks,
        });
    }

    // Skill links: each admitted occupation takes its highest-scoring skills.
    let admitted: Vec<usize> = (0..drafts.len()).filter(|i| !no_tasks.contains(i) && !no_links.contains(i)).collect();
    let mut rng = seeded(derive(spec.seed, 4));
    let noise = Normal::new(0.0, spec.link_noise).expect("valid noise");
    let degree_weights: Vec<f64> = admitted.iter().map(|_| 0.5 + rng.gen::<f64>()).collect();
    let linked_total = spec.edges;
    let degrees = apportion_degrees(&degree_weights, linked_total, skills.len());
    let mut scores: Vec<Vec<f64>> = Vec::with_capacity(admitted.len());
    for &i in &admitted {
        let d = &drafts[i];
        let align = 2.0 * d.routineness - 1.0;
        scores.push(
            skills
                .iter()
                .map(|(s, category)| {
                    let domain = if skill_domains(&s.name).contains(&d.group.as_str()) { 1.0 } else { 0.0 };
                    skill_popularity(&s.name)
                        + spec.link_domain * domain
                        + spec.link_alignment * skill_loading(category, &s.name) * align
                        + noise.sample(&mut rng)
                })
                .collect(),
        );
    }
    let mut chosen_links: Vec<Vec<usize>> = scores
        .iter()
        .zip(&degrees)
        .map(|(row, &k)| {
            let mut order: Vec<usize> = (0..row.len()).collect();
            order.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
            order.truncate(k);
            order
        })
        .collect();
    // Every skill must be linked: an unused skill replaces the weakest link
    // of the occupation that scores it highest among those with spare links.
    for s in 0..skills.len() {
        if chosen_links.iter().any(|l| l.contains(&s)) {
            continue;
        }
        let mut counts = vec![0usize; skills.len()];
        chosen_links.iter().flatten().for_each(|&t| counts[t] += 1);
        let best = (0..admitted.len())
            .filter(|&o| chosen_links[o].iter().any(|&t| counts[t] > 1))
            .max_by(|&a, &b| scores[a][s].total_cmp(&scores[b][s]).then(b.cmp(&a)))
            .ok_or_else(|| Error::DegenerateInput("cannot link every skill".into()))?;
        let row = &mut chosen_links[best];
        let weakest = row
            .iter()
            .enumerate()
            .filter(|&(_, &t)| counts[t] > 1)
            .min_by(|a, b| scores[best][*a.1].total_cmp(&scores[best][*b.1]))
            .map(|(k, _)| k)
            .expect("occupation has a removable link");
        row[weakest] = s;
    }
    let mut links = Vec::with_capacity(linked_total);
    for (k, &i) in admitted.iter().enumerate() {
        let mut row = chosen_links[k].clone();
        row.sort_unstable();
        for s in row {
            links.push(LinkRecord {
                soc_code: drafts[i].soc_code.clone(),
                skill_id: skills[s].0.skill_id.clone(),
            });
        }
    }

    // Expert assessment and balanced labels.
    let mut rng = seeded(derive(spec.seed, 5));
    let expert_noise = Normal::new(0.0, spec.expert_noise).expect("valid noise");
    let expert: Vec<f64> = drafts
        .iter()
        .map(|d| sigmoid(logit(d.routineness) + expert_noise.sample(&mut rng)))
        .collect();
    let eligible: Vec<usize> = admitted.iter().copied().filter(|&i| !drafts[i].reserved).collect();
    let mut by_prob = eligible.clone();
    by_prob.sort_by(|&a, &b| expert[b].total_cmp(&expert[a]).then(drafts[a].soc_code.cmp(&drafts[b].soc_code)));
    let take = |order: &mut dyn Iterator<Item = usize>| -> Vec<usize> {
        let mut per_group: BTreeMap<&str, usize> = BTreeMap::new();
        let mut out = Vec::new();
        for i in order {
            if out.len() == spec.labeled_per_class {
                break;
            }
            let g = per_group.entry(drafts[i].group.as_str()).or_default();
            if *g < spec.group_cap {
                *g += 1;
                out.push(i);
            }
        }
        out
    };
    let automated = take(&mut by_prob.iter().copied());
    let non_automated = take(&mut by_prob.iter().rev().copied());
    if automated.len() < spec.labeled_per_class || non_automated.len() < spec.labeled_per_class {
        return Err(Error::DegenerateInput("group cap leaves too few label candidates".into()));
    }
    let mut labels: Vec<LabelRecord> = automated
        .iter()
        .map(|&i| (i, Label::Automated))
        .chain(non_automated.iter().map(|&i| (i, Label::NonAutomated)))
        .map(|(i, label)| LabelRecord {
            soc_code: drafts[i].soc_code.clone(),
            label,
        })
        .collect();
    labels.sort_by(|a, b| a.soc_code.cmp(&b.soc_code));

    let declining = DECLINING
        .iter()
        .map(|&(title, soc, decline)| DecliningEntry {
            title: title.to_string(),
            soc_code: Some(soc.to_string()),
            decline,
        })
        .collect();
    let latent = drafts
        .iter()
        .zip(&expert)
        .map(|(d, &e)| (d.soc_code.clone(), d.group.clone(), d.routineness, e))
        .collect();
    Ok(Fixture {
        spec: spec.clone(),
        occupations,
        skills: skills.into_iter().map(|(s, _)| s).collect(),
        links,
        labels,
        declining,
        latent,
    })
}

pub const DECLINING_FILE: &str = "declining.csv";
pub const LATENT_FILE: &str = "latent.csv";
pub const MANIFEST_FILE: &str = "fixture_manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureManifest {
    pub generator: String,
    pub spec: FixtureSpec,
    pub counts: BTreeMap<String, usize>,
    pub skill_sources: Vec<SkillSource>,
    pub provenance: Vec<String>,
    /// SHA-256 of each written file.
    pub digests: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkillSource {
    pub category: String,
    pub id_prefix: String,
    pub elements: usize,
}

pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl Fixture {
    /// Writes the corpus files, the declining list, the latent scores and a
    /// manifest into `dir`.
    pub fn write(&self, dir: &Path) -> Result<FixtureManifest> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let paths = CorpusPaths::in_dir(dir);
        corpus::write_occupations(&paths.occupations, &paths.tasks, &self.occupations)?;
        corpus::write_skills(&paths.skills, &self.skills)?;
        corpus::write_links(&paths.links, &self.links)?;
        corpus::write_labels(&paths.labels, &self.labels)?;
        risk::write_declining(&dir.join(DECLINING_FILE), &self.declining)?;
        let latent_path = dir.join(LATENT_FILE);
        let mut w = csv::Writer::from_path(&latent_path)?;
        w.write_record(["soc_code", "major_group", "routineness", "expert_probability"])?;
        for (soc, group, r, e) in &self.latent {
            w.write_record([soc.as_str(), group.as_str(), &format!("{r:.6}"), &format!("{e:.6}")])?;
        }
        w.flush().map_err(|e| Error::io(&latent_path, e))?;

        let mut digests = BTreeMap::new();
        for p in paths.all().into_iter().map(Path::to_path_buf).chain([dir.join(DECLINING_FILE), latent_path]) {
            let name = p.file_name().expect("file name").to_string_lossy().into_owned();
            digests.insert(name, file_digest(&p)?);
        }
        let tasks: usize = self.occupations.iter().map(|o| o.task_statements.len()).sum();
        let counts = BTreeMap::from([
            ("occupations_written".to_string(), self.occupations.len()),
            (
                "occupations_admitted".to_string(),
                self.occupations.len() - self.spec.excluded_without_links - self.spec.excluded_without_tasks,
            ),
            ("task_statements".to_string(), tasks),
            ("skills".to_string(), self.skills.len()),
            ("edges".to_string(), self.links.len()),
            ("labels".to_string(), self.labels.len()),
            (
                "labels_automated".to_string(),
                self.labels.iter().filter(|l| l.label == Label::Automated).count(),
            ),
            ("declining_entries".to_string(), self.declining.len()),
        ]);
        let manifest = FixtureManifest {
            generator: format!("occrisk {} synthetic fixture", env!("CARGO_PKG_VERSION")),
            spec: self.spec.clone(),
            counts,
            skill_sources: SKILL_SOURCES
                .iter()
                .zip(SKILL_PREFIXES)
                .map(|((c, names), p)| SkillSource {
                    category: c.to_string(),
                    id_prefix: p.to_string(),
                    elements: names.len(),
                })
                .collect(),
            provenance: vec![
                "Synthetic corpus generated offline; it is not an O*NET extract.".into(),
                "Skill nodes merge O*NET content-model element names: all 35 Skills, all 33 Knowledge areas, all 52 Abilities and 15 Work Styles (Achievement/Effort omitted). Ids are local, not O*NET element ids.".into(),
                "Anchor occupations use real SOC codes and O*NET titles; their routineness is an approximate published automation probability. All other titles and codes are composed.".into(),
                "Task statements are template sentences whose verbs and modifiers lean routine or creative with the occupation's latent routineness.".into(),
                "Labels take the highest and lowest noisy expert probabilities, at most group_cap per SOC major group and class; anchors reserved for risk reporting are never labeled.".into(),
                "declining.csv lists occupations reported with the largest projected 2020-2030 employment declines; decline figures are rounded illustrations.".into(),
                "latent.csv exposes the generator's routineness and expert probability for analysis only; the pipeline never reads it.".into(),
            ],
            digests,
        };
        let text = serde_json::to_string_pretty(&manifest)?;
        let path = dir.join(MANIFEST_FILE);
        std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
        Ok(manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Corpus;

    #[test]
    fn skill_sources_total_135() {
        let total: usize = SKILL_SOURCES.iter().map(|(_, n)| n.len()).sum();
        assert_eq!(total, 135);
        let groups: usize = GROUPS.iter().map(|g| g.2).sum();
        assert_eq!(groups, 916);
    }

    #[test]
    fn declining_entries_are_anchored() {
        assert_eq!(DECLINING.len(), 29);
        for (_, soc, _) in DECLINING {
            assert!(ANCHORS.iter().any(|a| a.soc_code == *soc && a.reserved), "{soc}");
        }
    }

    #[test]
    fn default_fixture_has_target_shape() {
        let fx = generate(&FixtureSpec::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let manifest = fx.write(dir.path()).unwrap();
        assert_eq!(manifest.counts["edges"], 13_222);
        let corpus = Corpus::load(dir.path()).unwrap();
        assert_eq!(corpus.occupations.len(), 910);
        assert_eq!(corpus.skills.len(), 135);
        assert_eq!(corpus.links.len(), 13_222);
        assert_eq!(corpus.labels.len(), 112);
        assert_eq!(corpus.excluded.len(), 6);
        let linked: BTreeSet<&str> = corpus.links.iter().map(|l| l.skill_id.as_str()).collect();
        assert_eq!(linked.len(), 135);
        // Same spec, same bytes.
        let dir2 = tempfile::tempdir().unwrap();
        let again = generate(&FixtureSpec::default()).unwrap().write(dir2.path()).unwrap();
        assert_eq!(again.digests, manifest.digests);
    }
}
