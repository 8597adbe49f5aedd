# -*- coding: utf-8 -*-
import smach


class SagHallo(smach.StateMachine):
    """Begrüßt den Gast, höflich."""
    def __init__(self, robot):
        smach.StateMachine.__init__(self, outcomes=["done"])
        with self:
            smach.StateMachine.add("SAY", Say(robot, "Grüß Gott"), transitions={"spoken": "done"})
class Zweite(smach.StateMachine):
    def __init__(self, robot):
        smach.StateMachine.__init__(self, outcomes=["done"])
