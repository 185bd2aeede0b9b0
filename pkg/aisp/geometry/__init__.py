"""Camera model, rigid transforms and grasp planning."""
